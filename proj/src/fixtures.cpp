#include "povmrand/scenario.hpp"

#include <cmath>
#include <json.hpp>

namespace povmrand {

namespace {

struct EmbeddedFixture {
    const char* name;
    const char* text;
};

const EmbeddedFixture kEmbedded[] = {
#include "povmrand/fixture_data.inc"
};

using nlohmann::json;

Measured readMeasured(const json& j) {
    Measured m{j.at("value").get<double>(), j.value("sigma", 0.0)};
    if (m.sigma < 0) throw InputError("fixture uncertainty must be non-negative");
    return m;
}

Statistic::Direction readDirection(const json& j, double value) {
    if (!j.contains("direction")) return value >= 0 ? Statistic::Direction::AtLeast : Statistic::Direction::AtMost;
    const auto d = j.at("direction").get<std::string>();
    if (d == "at_least") return Statistic::Direction::AtLeast;
    if (d == "at_most") return Statistic::Direction::AtMost;
    throw InputError("unknown statistic direction '" + d + "'");
}

std::string corrName(int x, int y) {
    return "<A" + std::to_string(x + 1) + "B" + std::to_string(y + 1) + ">";
}

}  // namespace

Fixture parseFixture(const std::string& jsonText) {
    json j;
    try {
        j = json::parse(jsonText);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("fixture is not valid JSON: ") + e.what());
    }
    try {
        Fixture f;
        f.name = j.at("name").get<std::string>();
        f.version = j.value("version", 1);
        f.source = j.value("source", "");
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "bell") f.kind = CertKind::Bell;
        else if (kind == "prepare_measure") f.kind = CertKind::PrepareMeasure;
        else if (kind == "table") f.kind = CertKind::Bell;
        else throw InputError("unknown fixture kind '" + kind + "'");

        if (j.contains("correlators"))
            for (const auto& c : j.at("correlators")) {
                Statistic s;
                const int x = c.at("x").get<int>(), y = c.at("y").get<int>();
                s.name = corrName(x, y);
                s.functional.addCorrelator(x, y, 1.0);
                s.measured = readMeasured(c);
                s.direction = readDirection(c, s.measured.value);
                f.statistics.push_back(std::move(s));
            }
        if (j.contains("games"))
            for (const auto& g : j.at("games")) {
                Statistic s;
                s.name = g.at("name").get<std::string>();
                const auto cert = g.at("certificate").get<std::string>();
                if (cert != "reduced-qrac") throw InputError("unsupported game certificate '" + cert + "'");
                s.functional = reducedQracCertificate(0).functional;
                s.measured = readMeasured(g);
                s.direction = readDirection(g, 1.0);
                f.statistics.push_back(std::move(s));
            }
        if (j.contains("probabilities"))
            for (const auto& p : j.at("probabilities")) {
                Statistic s;
                Event e{p.value("a", -1), p.at("b").get<int>(), p.at("x").get<int>(), p.at("y").get<int>()};
                if (f.kind == CertKind::Bell)
                    s.name = "P(" + std::to_string(e.a + 1) + "," + (e.b == 0 ? "+" : "-") + "|" +
                             std::to_string(e.x + 1) + "," + std::to_string(e.y + 1) + ")";
                else
                    s.name = "P(" + std::to_string(e.b + 1) + "|" + std::to_string(e.x + 1) + "," +
                             std::to_string(e.y + 1) + ")";
                s.functional.add(e, 1.0);
                s.measured = readMeasured(p);
                s.direction = readDirection(p, -1.0);
                f.statistics.push_back(std::move(s));
            }
        if (j.contains("published"))
            for (const auto& [key, v] : j.at("published").items()) f.published[key] = readMeasured(v);
        if (j.contains("assumptions"))
            for (const auto& a : j.at("assumptions")) f.assumptions.push_back(a.get<std::string>());
        return f;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed fixture: ") + e.what());
    }
}

Fixture loadFixture(const std::string& name) {
    for (const auto& e : kEmbedded)
        if (name == e.name) return parseFixture(e.text);
    throw InputError("unknown fixture '" + name + "'");
}

std::vector<std::string> fixtureNames() {
    std::vector<std::string> out;
    for (const auto& e : kEmbedded) out.emplace_back(e.name);
    return out;
}

const Statistic& Fixture::statistic(const std::string& n) const {
    for (const auto& s : statistics)
        if (s.name == n) return s;
    throw InputError("fixture '" + name + "' has no statistic '" + n + "'");
}

namespace {

double penaltySum(const Fixture& f) {
    double sum = 0;
    for (const auto& s : f.statistics)
        if (s.name.rfind("P(", 0) == 0) sum += s.measured.value;
    return sum;
}

}  // namespace

double Fixture::certificateValue(const Certificate& cert) const {
    if (cert.id == "elegant" && kind == CertKind::Bell) {
        auto it = published.find("beta_el_raw");
        double base = 0;
        if (it != published.end()) {
            base = it->second.value;
        } else {
            for (const auto& s : statistics)
                if (s.name[0] == '<') base += std::abs(s.measured.value);
        }
        return base - cert.penaltyK * penaltySum(*this);
    }
    if (cert.id == "reduced-qrac" && kind == CertKind::PrepareMeasure)
        return statistic("R_3to1").measured.value - cert.penaltyK * penaltySum(*this);
    if (kind == CertKind::Bell) return cert.evaluate(impliedBellBehavior());
    return cert.evaluate(impliedPmBehavior());
}

BellBehavior Fixture::impliedBellBehavior() const {
    if (kind != CertKind::Bell) throw InputError("fixture '" + name + "' is not a Bell fixture");
    BellBehavior p = BellBehavior::uniform(elegantScenario());
    for (const auto& s : statistics) {
        if (s.name[0] != '<') continue;
        const Event& e = s.functional.terms.front().event;
        const double E = s.measured.value;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) p.at(a, b, e.x, e.y) = (1 + ((a + b) % 2 == 0 ? E : -E)) / 4;
    }
    for (const auto& s : statistics) {
        if (s.name[0] != 'P') continue;
        const Event& e = s.functional.terms.front().event;
        if (e.x != 3 || e.b != 0 || e.a != e.y) throw InputError("unsupported probability statistic " + s.name);
        const double v = s.measured.value, rest = (0.5 - v) / 3;
        for (int a = 0; a < 4; ++a) {
            p.at(a, 0, 3, e.y) = a == e.y ? v : rest;
            p.at(a, 1, 3, e.y) = a == e.y ? 0.25 - v : 0.25 - rest;
        }
    }
    p.validate();
    return p;
}

PmBehavior Fixture::impliedPmBehavior() const {
    if (kind != CertKind::PrepareMeasure) throw InputError("fixture '" + name + "' is not a prepare-and-measure fixture");
    PmBehavior p = PmBehavior::uniform(reducedQracScenario());
    const double R = statistic("R_3to1").measured.value;
    const auto& strings = reducedQracStrings();
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 3; ++y) {
            const int bit = strings[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
            p.at(bit, x, y) = R;
            p.at(1 - bit, x, y) = 1 - R;
        }
    for (const auto& s : statistics) {
        if (s.name[0] != 'P') continue;
        const Event& e = s.functional.terms.front().event;
        if (e.y != 3 || e.b != e.x) throw InputError("unsupported probability statistic " + s.name);
        for (int b = 0; b < 4; ++b) p.at(b, e.x, 3) = b == e.b ? s.measured.value : (1 - s.measured.value) / 3;
    }
    p.validate();
    return p;
}

std::vector<ProtocolRow> publishedProtocolRows() {
    for (const auto& e : kEmbedded) {
        if (std::string(e.name) != "mdi-protocols") continue;
        const auto j = nlohmann::json::parse(e.text);
        std::vector<ProtocolRow> rows;
        for (const auto& r : j.at("rows"))
            rows.push_back({r.at("label").get<std::string>(), r.at("event_rate_hz").get<double>(),
                            r.at("raw_bits_per_event").get<double>(), r.at("bit_rate").get<double>(),
                            r.at("bit_rate_over_event_rate").get<double>()});
        return rows;
    }
    throw InputError("protocol table missing");
}

}  // namespace povmrand

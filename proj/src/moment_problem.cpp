#include "povmrand/moment_problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace povmrand {

void Affine::add(int var, double c) {
    if (c == 0) return;
    auto it = std::lower_bound(terms.begin(), terms.end(), var,
                               [](const std::pair<int, double>& t, int v) { return t.first < v; });
    if (it != terms.end() && it->first == var) {
        it->second += c;
        if (it->second == 0) terms.erase(it);
    } else {
        terms.insert(it, {var, c});
    }
}

void Affine::addScaled(const Affine& o, double s) {
    constant += s * o.constant;
    if (terms.empty()) {
        for (const auto& [v, c] : o.terms)
            if (c * s != 0) terms.emplace_back(v, c * s);
        return;
    }
    std::vector<std::pair<int, double>> merged;
    merged.reserve(terms.size() + o.terms.size());
    std::size_t i = 0, j = 0;
    while (i < terms.size() || j < o.terms.size()) {
        if (j == o.terms.size() || (i < terms.size() && terms[i].first < o.terms[j].first)) {
            merged.push_back(terms[i++]);
        } else if (i == terms.size() || o.terms[j].first < terms[i].first) {
            if (o.terms[j].second * s != 0) merged.emplace_back(o.terms[j].first, o.terms[j].second * s);
            ++j;
        } else {
            const double c = terms[i].second + s * o.terms[j].second;
            if (c != 0) merged.emplace_back(terms[i].first, c);
            ++i;
            ++j;
        }
    }
    terms = std::move(merged);
}

double Affine::evaluate(const std::vector<double>& x) const {
    double v = constant;
    for (const auto& [i, c] : terms) v += c * x[static_cast<std::size_t>(i)];
    return v;
}

EventForm& EventForm::add(std::vector<Outcome> outcomes, double w) {
    terms.push_back({std::move(outcomes), w});
    return *this;
}

EventForm EventForm::fromBell(const Functional& f) {
    EventForm e;
    e.constant = f.constant;
    for (const auto& t : f.terms) {
        if (t.event.a < 0) throw InputError("Bell functional term without Alice's outcome");
        e.add({{kA, t.event.x, t.event.a}, {kB, t.event.y, t.event.b}}, t.weight);
    }
    return e;
}

EventForm EventForm::fromPm(const Functional& f) {
    EventForm e;
    e.constant = f.constant;
    for (const auto& t : f.terms) e.add({{kP, t.event.x, 0}, {kB, t.event.y, t.event.b}}, t.weight);
    return e;
}

EventForm guessLocalForm(int xStar, int outcomes) {
    EventForm e;
    for (int a = 0; a < outcomes; ++a) e.add({{kA, xStar, a}, {kE, 0, a}}, 1.0);
    return e;
}

EventForm guessPmForm(int yStar, int preparations, int outcomes) {
    EventForm e;
    for (int x = 0; x < preparations; ++x)
        for (int b = 0; b < outcomes; ++b) e.add({{kP, x, 0}, {kB, yStar, b}, {kE, 0, b}}, 1.0 / preparations);
    return e;
}

std::vector<DataSpec> nietoSillerasConstraints(const Fixture& fixture, ConstraintMode mode) {
    std::vector<DataSpec> out;
    for (const auto& s : fixture.statistics) {
        DataSpec d;
        d.name = s.name;
        d.functional = s.functional;
        d.value = s.measured.value;
        if (mode == ConstraintMode::Equality) d.sense = Sense::Equal;
        else d.sense = s.direction == Statistic::Direction::AtLeast ? Sense::AtLeast : Sense::AtMost;
        out.push_back(std::move(d));
    }
    return out;
}

std::size_t PsdBlock::index(int i, int j) const {
    if (i > j) std::swap(i, j);
    const auto n = static_cast<std::size_t>(size());
    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    return ui * n - ui * (ui - 1) / 2 + (uj - ui);
}

int MomentProblem::inequalityCount() const {
    int n = 0;
    for (const auto& d : data)
        if (d.spec.sense != Sense::Equal) ++n;
    return n;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string affineText(const Affine& a) {
    std::string s = fmt(a.constant);
    for (const auto& [v, c] : a.terms) s += " " + fmt(c) + "*x" + std::to_string(v);
    return s;
}

const char* senseText(Sense s) {
    switch (s) {
        case Sense::Equal: return "==";
        case Sense::AtLeast: return ">=";
        case Sense::AtMost: return "<=";
    }
    return "?";
}

class Builder {
public:
    Builder(MomentProblem& p, std::map<std::pair<int, int>, int> outcomeCounts)
        : p_(p), counts_(std::move(outcomeCounts)) {}

    // Splits every moment into Eve's central blocks: L(w) = sum_e L(w E_e).
    void splitEve(int outcomes) { eveBlocks_ = outcomes; }

    // Moment of a single word; creates the variable unless `existing` is set.
    Affine moment(const Word& w, bool existing) {
        Affine a;
        auto key = momentKey(w, p_.algebra);
        if (!key) return a;
        if (eveBlocks_ > 0 && (key->empty() || letterParty(key->back()) != kE)) {
            for (int e = 0; e < eveBlocks_; ++e) a.addScaled(moment(*key + makeLetter(kE, 0, e), existing), 1.0);
            return a;
        }
        if (key->empty()) {
            a.constant = p_.normalization;
            return a;
        }
        return variable(*key, existing);
    }

    Affine variable(const Word& key, bool existing) {
        Affine a;
        auto it = p_.varIndex.find(key);
        if (it == p_.varIndex.end()) {
            if (existing)
                throw InputError("moment " + wordName(key) + " is not available at this level of the relaxation");
            const int id = static_cast<int>(p_.variables.size());
            p_.variables.push_back(key);
            it = p_.varIndex.emplace(key, id).first;
        }
        a.add(it->second, 1.0);
        return a;
    }

    Affine poly(const Poly& q, bool existing) {
        Affine a;
        for (const auto& [w, c] : q) a.addScaled(moment(w, existing), c);
        return a;
    }

    Poly eventPoly(const std::vector<Outcome>& outcomes) const {
        Poly q{{Word(), 1.0}};
        for (const auto& o : outcomes) {
            int count = 1;
            if (o.party != kP) {
                auto it = counts_.find({o.party, o.setting});
                if (it == counts_.end()) throw InputError("event refers to an unknown measurement");
                count = it->second;
            }
            q = polyProduct(q, outcomePoly(o, count));
        }
        return q;
    }

    Affine form(const EventForm& f, bool existing) {
        Affine a;
        a.constant = f.constant;
        for (const auto& t : f.terms) a.addScaled(poly(eventPoly(t.outcomes), existing), t.weight);
        return a;
    }

    // Block with entries L(u^dagger * left * v * right) for rows u, v.
    PsdBlock block(std::string label, const std::vector<Word>& rows, const Poly& middle, const Poly& right) {
        PsdBlock b;
        b.label = std::move(label);
        b.rows = rows;
        const int n = b.size();
        b.entries.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2);
        for (int i = 0; i < n; ++i) {
            const Poly left{{adjoint(rows[static_cast<std::size_t>(i)]), 1.0}};
            const Poly lm = polyProduct(left, middle);
            for (int j = i; j < n; ++j) {
                const Poly v{{rows[static_cast<std::size_t>(j)], 1.0}};
                b.entries.push_back(poly(polyProduct(polyProduct(lm, v), right), false));
            }
        }
        return b;
    }

    void attachData(const std::vector<DataSpec>& data, bool bell) {
        for (const auto& d : data) {
            const EventForm f = bell ? EventForm::fromBell(d.functional) : EventForm::fromPm(d.functional);
            p_.data.push_back({d, form(f, true)});
        }
    }

private:
    MomentProblem& p_;
    std::map<std::pair<int, int>, int> counts_;
    int eveBlocks_ = 0;
};

const Poly kOne{{Word(), 1.0}};

}  // namespace

std::string MomentProblem::serialize() const {
    std::ostringstream os;
    os << "algebra " << (algebra == Algebra::Projective ? "projective" : "tracial") << "\n";
    os << "normalization " << fmt(normalization) << "\n";
    os << "words " << words.size() << "\n";
    for (std::size_t i = 0; i < words.size(); ++i) os << i << " " << wordName(words[i]) << "\n";
    os << "variables " << variables.size() << "\n";
    for (std::size_t i = 0; i < variables.size(); ++i) os << "x" << i << " " << wordName(variables[i]) << "\n";
    for (const auto& b : blocks) {
        os << "block " << b.label << " " << b.size() << "\n";
        for (int i = 0; i < b.size(); ++i)
            for (int j = i; j < b.size(); ++j) os << i << " " << j << " " << affineText(b.at(i, j)) << "\n";
    }
    os << "equalities " << equalities.size() << "\n";
    for (const auto& e : equalities) os << affineText(e) << " == 0\n";
    os << "data " << data.size() << "\n";
    for (const auto& d : data)
        os << d.spec.name << " " << affineText(d.form) << " " << senseText(d.spec.sense) << " " << fmt(d.spec.value) << "\n";
    os << "objective max " << affineText(objective) << "\n";
    return os.str();
}

MomentProblem buildBellMomentProblem(const BellScenario& scenario, const LevelSpec& spec, const EventForm& objective,
                                     const std::vector<DataSpec>& data) {
    MomentProblem p;
    p.algebra = Algebra::Projective;
    p.normalization = 1;
    std::map<std::pair<int, int>, int> counts;
    for (int party = 0; party < scenario.parties(); ++party)
        for (int s = 0; s < scenario.settings(party); ++s) counts[{party, s}] = scenario.outcomes(party, s);
    Builder b(p, counts);
    p.words = generateMonomials(scenario, spec);
    p.blocks.push_back(b.block("moment", p.words, kOne, kOne));
    p.objective = b.form(objective, true);
    b.attachData(data, true);
    return p;
}

MomentProblem buildPmMomentProblem(const PmScenario& scenario, int dimension, const LevelSpec& spec,
                                   const EventForm& objective, const std::vector<DataSpec>& data, int eveOutcomes) {
    scenario.validate();
    if (dimension < 2) throw InputError("dimension must be at least 2");
    if (eveOutcomes == 1 || eveOutcomes < 0) throw InputError("Eve needs at least two outcomes");
    MomentProblem p;
    p.algebra = Algebra::Tracial;
    const int blocksE = eveOutcomes > 0 ? eveOutcomes : 1;
    p.normalization = dimension;

    std::map<std::pair<int, int>, int> counts;
    for (std::size_t y = 0; y < scenario.measurements.size(); ++y)
        counts[{kB, static_cast<int>(y)}] = scenario.measurements[y];
    if (eveOutcomes > 0) counts[{kE, 0}] = eveOutcomes;
    Builder b(p, counts);

    // Eve's letters are central, so E-carrying blocks of the spec reduce to their
    // preparation/effect part inside each of Eve's blocks.
    LevelSpec body;
    body.level = spec.level;
    for (const auto& blk : spec.blocks) {
        std::string s;
        for (char c : blk)
            if (c != 'E') s += c;
        if (!s.empty()) body.blocks.push_back(s);
    }
    const Alphabet alpha = Alphabet::pm(scenario, 0);
    p.words = generateMonomials(alpha, body);
    const auto locRows = generateMonomials(alpha, LevelSpec{spec.level - 1, {}});

    std::vector<std::pair<std::string, Poly>> localizers;
    for (int x = 0; x < scenario.preparations; ++x) {
        const Word rho(1, makeLetter(kP, x, 0));
        localizers.push_back({"rho" + std::to_string(x), Poly{{rho, 1.0}}});
        localizers.push_back({"1-rho" + std::to_string(x), Poly{{Word(), 1.0}, {rho, -1.0}}});
    }
    for (std::size_t y = 0; y < scenario.measurements.size(); ++y)
        for (int o = 0; o < scenario.measurements[y]; ++o) {
            const Outcome out{kB, static_cast<int>(y), o};
            localizers.push_back({"M" + std::to_string(o) + "|" + std::to_string(y), outcomePoly(out, scenario.measurements[y])});
        }

    if (eveOutcomes > 0) b.splitEve(eveOutcomes);
    for (int e = 0; e < blocksE; ++e) {
        const Poly right = eveOutcomes > 0 ? Poly{{Word(1, makeLetter(kE, 0, e)), 1.0}} : kOne;
        const std::string suffix = eveOutcomes > 0 ? "@E" + std::to_string(e) : "";
        p.blocks.push_back(b.block("moment" + suffix, p.words, kOne, right));
        for (const auto& [name, q] : localizers) p.blocks.push_back(b.block(name + suffix, locRows, q, right));
    }
    for (int x = 0; x < scenario.preparations; ++x) {
        Affine eq = b.moment(Word(1, makeLetter(kP, x, 0)), true);
        eq.constant -= 1;
        p.equalities.push_back(eq);
    }
    // Eve's blocks carry free weights that add up to the trace of the identity.
    if (eveOutcomes > 0) {
        Affine eq = b.moment(Word(), true);
        eq.constant -= dimension;
        p.equalities.push_back(eq);
    }
    p.objective = b.form(objective, true);
    b.attachData(data, false);
    return p;
}

double evaluateMoments(const MomentProblem&, const Affine& a, const std::vector<double>& x) { return a.evaluate(x); }

}  // namespace povmrand

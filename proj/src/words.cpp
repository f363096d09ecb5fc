#include "povmrand/words.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace povmrand {

std::string letterName(Letter l) {
    static const char tags[] = {'A', 'B', 'E', 'P'};
    const int p = letterParty(l);
    if (p < 0 || p > 3) return "?";
    if (p == kP) return "P" + std::to_string(letterSetting(l));
    return std::string(1, tags[p]) + std::to_string(letterOutcome(l)) + "|" + std::to_string(letterSetting(l));
}

std::string wordName(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += '*';
        s += letterName(w[i]);
    }
    return s;
}

Word adjoint(const Word& w) { return Word(w.rbegin(), w.rend()); }

bool gradedLess(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

namespace {

// Reduces a run of projectors from a single party. Returns false if the product is zero.
bool reduceProjectors(const Word& in, Word& out) {
    out.clear();
    for (Letter l : in) {
        if (!out.empty()) {
            const Letter t = out.back();
            if (t == l) continue;
            if (letterSetting(t) == letterSetting(l)) return false;
        }
        out.push_back(l);
    }
    return true;
}

std::optional<Word> canonicalProjective(const Word& w) {
    Word sorted = w;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](Letter a, Letter b) { return letterParty(a) < letterParty(b); });
    Word out, part, reduced;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && letterParty(sorted[j]) == letterParty(sorted[i])) ++j;
        part.assign(sorted.begin() + static_cast<std::ptrdiff_t>(i), sorted.begin() + static_cast<std::ptrdiff_t>(j));
        if (!reduceProjectors(part, reduced)) return std::nullopt;
        out += reduced;
        i = j;
    }
    return out;
}

// Tracial algebra: E letters are central projectors, moved to the end.
std::optional<Word> canonicalTracial(const Word& w) {
    Word rest, eve;
    for (Letter l : w) (letterParty(l) == kE ? eve : rest).push_back(l);
    std::sort(eve.begin(), eve.end());
    Word reduced;
    if (!reduceProjectors(eve, reduced)) return std::nullopt;
    return rest + reduced;
}

Word minRotation(const Word& w) {
    Word best = w, cur = w;
    for (std::size_t k = 1; k < w.size(); ++k) {
        std::rotate(cur.begin(), cur.begin() + 1, cur.end());
        if (cur < best) best = cur;
    }
    return best;
}

}  // namespace

std::optional<Word> canonicalize(const Word& w, Algebra alg) {
    return alg == Algebra::Projective ? canonicalProjective(w) : canonicalTracial(w);
}

std::optional<Word> momentKey(const Word& w, Algebra alg) {
    auto c = canonicalize(w, alg);
    if (!c) return std::nullopt;
    if (alg == Algebra::Projective) {
        auto r = canonicalProjective(adjoint(*c));
        return gradedLess(*r, *c) ? *r : *c;
    }
    std::size_t split = 0;
    while (split < c->size() && letterParty((*c)[split]) != kE) ++split;
    const Word body = c->substr(0, split), eve = c->substr(split);
    const Word a = minRotation(body), b = minRotation(adjoint(body));
    return std::min(a, b) + eve;
}

LevelSpec LevelSpec::parse(const std::string& text) {
    LevelSpec spec;
    std::size_t pos = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == 0) throw InputError("level spec '" + text + "' must start with an integer");
    spec.level = std::stoi(text.substr(0, pos));
    if (spec.level < 1 || spec.level > 3) throw InputError("base level must be 1, 2 or 3");
    while (pos < text.size()) {
        if (text[pos] != '+') throw InputError("level spec '" + text + "': expected '+'");
        ++pos;
        std::string block;
        while (pos < text.size() && text[pos] != '+') {
            const char c = text[pos++];
            if (c != 'A' && c != 'B' && c != 'E' && c != 'P')
                throw InputError("level spec '" + text + "': unknown party '" + std::string(1, c) + "'");
            block += c;
        }
        if (block.empty()) throw InputError("level spec '" + text + "': empty block");
        spec.blocks.push_back(block);
    }
    return spec;
}

std::string LevelSpec::str() const {
    std::string s = std::to_string(level);
    for (const auto& b : blocks) s += "+" + b;
    return s;
}

std::vector<Letter> partyLetters(const std::vector<int>& outcomesPerSetting, int party) {
    std::vector<Letter> out;
    for (std::size_t s = 0; s < outcomesPerSetting.size(); ++s)
        for (int o = 0; o + 1 < outcomesPerSetting[s]; ++o) out.push_back(makeLetter(party, static_cast<int>(s), o));
    return out;
}

std::vector<Letter> Alphabet::all() const {
    std::set<Letter> seen;
    for (const auto& [tag, letters] : byTag) seen.insert(letters.begin(), letters.end());
    return {seen.begin(), seen.end()};
}

Alphabet Alphabet::bell(const BellScenario& s) {
    Alphabet a;
    a.algebra = Algebra::Projective;
    static const char tags[] = {'A', 'B', 'E'};
    for (int p = 0; p < s.parties(); ++p) a.byTag[tags[p]] = partyLetters(s.table()[static_cast<std::size_t>(p)], p);
    return a;
}

Alphabet Alphabet::pm(const PmScenario& s, int eveOutcomes) {
    s.validate();
    Alphabet a;
    a.algebra = Algebra::Tracial;
    std::vector<Letter> preps;
    for (int x = 0; x < s.preparations; ++x) preps.push_back(makeLetter(kP, x, 0));
    a.byTag['P'] = preps;
    a.byTag['A'] = preps;
    a.byTag['B'] = partyLetters(s.measurements, kB);
    if (eveOutcomes > 0) a.byTag['E'] = partyLetters({eveOutcomes}, kE);
    return a;
}

std::vector<Word> generateMonomials(const Alphabet& alphabet, const LevelSpec& spec) {
    const auto letters = alphabet.all();
    std::set<Word, decltype(&gradedLess)> words(&gradedLess);
    words.insert(Word());
    std::vector<Word> frontier{Word()};
    for (int len = 1; len <= spec.level; ++len) {
        std::vector<Word> next;
        for (const auto& w : frontier)
            for (Letter l : letters) {
                auto c = canonicalize(w + l, alphabet.algebra);
                if (c && c->size() == w.size() + 1 && words.insert(*c).second) next.push_back(*c);
            }
        frontier = std::move(next);
    }
    for (const auto& block : spec.blocks) {
        std::vector<Word> products{Word()};
        for (char tag : block) {
            auto it = alphabet.byTag.find(tag);
            if (it == alphabet.byTag.end()) {
                products.clear();
                break;
            }
            std::vector<Word> grown;
            for (const auto& w : products)
                for (Letter l : it->second) grown.push_back(w + l);
            products = std::move(grown);
        }
        for (const auto& w : products)
            if (auto c = canonicalize(w, alphabet.algebra)) words.insert(*c);
    }
    return {words.begin(), words.end()};
}

std::vector<Word> generateMonomials(const BellScenario& scenario, const LevelSpec& spec) {
    return generateMonomials(Alphabet::bell(scenario), spec);
}

void addTerm(Poly& p, const Word& w, double c) {
    if (c == 0) return;
    auto [it, inserted] = p.emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

Poly polyProduct(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) addTerm(r, wa + wb, ca * cb);
    return r;
}

Poly outcomePoly(const Outcome& o, int outcomeCount) {
    if (o.outcome < 0 || o.outcome >= outcomeCount) throw InputError("outcome out of range");
    Poly p;
    if (o.party == kP) {
        p[Word(1, makeLetter(kP, o.setting, 0))] = 1;
        return p;
    }
    if (o.outcome + 1 < outcomeCount) {
        p[Word(1, makeLetter(o.party, o.setting, o.outcome))] = 1;
        return p;
    }
    p[Word()] = 1;
    for (int b = 0; b + 1 < outcomeCount; ++b) p[Word(1, makeLetter(o.party, o.setting, b))] = -1;
    return p;
}

}  // namespace povmrand

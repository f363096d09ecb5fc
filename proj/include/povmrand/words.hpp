#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "povmrand/scenario.hpp"

namespace povmrand {

// Party tags, in canonical order.
enum Party : int { kA = 0, kB = 1, kE = 2, kP = 3 };

// A letter packs (party, setting, outcome) into one code unit; a word is a
// sequence of letters. For preparation letters the setting is the preparation
// index and the outcome is 0.
using Letter = char16_t;
using Word = std::u16string;

constexpr Letter makeLetter(int party, int setting, int outcome) {
    return static_cast<Letter>(party * 4096 + setting * 64 + outcome);
}
constexpr int letterParty(Letter l) { return l / 4096; }
constexpr int letterSetting(Letter l) { return (l % 4096) / 64; }
constexpr int letterOutcome(Letter l) { return l % 64; }

std::string letterName(Letter l);
std::string wordName(const Word& w);  // "1" for the empty word

// Operator algebra a word lives in.
enum class Algebra {
    Projective,  // Bell scenarios: projectors, parties commute
    Tracial      // prepare-and-measure: generic positive operators under a trace; E central projectors
};

// Applies commutation, idempotence and orthogonality. Returns nullopt for zero.
std::optional<Word> canonicalize(const Word& w, Algebra alg = Algebra::Projective);

// Canonical key of the real moment L(w): identifies w with its adjoint (and, in
// the tracial algebra, with its cyclic rotations).
std::optional<Word> momentKey(const Word& w, Algebra alg = Algebra::Projective);

Word adjoint(const Word& w);

// Graded lexicographic comparison: shorter words first, then letter codes.
bool gradedLess(const Word& a, const Word& b);

struct LevelSpec {
    int level = 1;
    std::vector<std::string> blocks;  // e.g. "AB", "ABE", "AAE"

    static LevelSpec parse(const std::string& text);  // INT("+"(A|B|E|P)+)*
    std::string str() const;
};

// Letters of one party that survive outcome elimination, in canonical order.
std::vector<Letter> partyLetters(const std::vector<int>& outcomesPerSetting, int party);

// Alphabet for monomial generation: letters grouped by the tag used in LevelSpec blocks.
struct Alphabet {
    Algebra algebra = Algebra::Projective;
    std::map<char, std::vector<Letter>> byTag;  // 'A', 'B', 'E', 'P'

    std::vector<Letter> all() const;
    static Alphabet bell(const BellScenario& s);
    // Prepare-and-measure: 'P' (and alias 'A') = preparations, 'B' = effects, 'E' = Eve.
    static Alphabet pm(const PmScenario& s, int eveOutcomes = 0);
};

std::vector<Word> generateMonomials(const Alphabet& alphabet, const LevelSpec& spec);
std::vector<Word> generateMonomials(const BellScenario& scenario, const LevelSpec& spec);

// Real linear combination of words.
using Poly = std::map<Word, double>;

void addTerm(Poly& p, const Word& w, double c);
Poly polyProduct(const Poly& a, const Poly& b);

// A measurement outcome (or preparation) of one party.
struct Outcome {
    int party = kA;
    int setting = 0;
    int outcome = 0;
};

// Projector onto `o`, expanding the eliminated last outcome as 1 - sum of the others.
Poly outcomePoly(const Outcome& o, int outcomeCount);

}  // namespace povmrand

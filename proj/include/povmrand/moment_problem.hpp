#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "povmrand/scenario.hpp"
#include "povmrand/words.hpp"

namespace povmrand {

// Sparse affine expression over moment variables: constant + sum coef * x[var].
struct Affine {
    std::vector<std::pair<int, double>> terms;  // sorted by variable, no zeros
    double constant = 0;

    void add(int var, double c);
    void addScaled(const Affine& o, double s);
    bool isConstant() const { return terms.empty(); }
    double evaluate(const std::vector<double>& x) const;
    bool operator==(const Affine&) const = default;
};

// Linear form on joint events; each term is a product of outcome projectors
// (one per party) weighted by a coefficient.
struct EventForm {
    struct Term {
        std::vector<Outcome> outcomes;
        double weight = 0;
    };
    std::vector<Term> terms;
    double constant = 0;

    EventForm& add(std::vector<Outcome> outcomes, double w);
    static EventForm fromBell(const Functional& f);
    static EventForm fromPm(const Functional& f);
};

// Sum_a P_{AE|X}(a, a | xStar): Eve guesses Alice's outcome for setting xStar.
EventForm guessLocalForm(int xStar, int outcomes);
// (1/nX) Sum_{x,b} P_{BE|XY}(b, b | x, yStar): Eve guesses Bob's outcome without knowing x.
EventForm guessPmForm(int yStar, int preparations, int outcomes);

enum class Sense { Equal, AtLeast, AtMost };

// A statistic of the behavior pinned or bounded by observed data.
struct DataSpec {
    std::string name;
    Functional functional;  // on the Bell or prepare-and-measure behavior
    Sense sense = Sense::Equal;
    double value = 0;
};

enum class ConstraintMode { Equality, Inequality };

// Turns the fixture's statistics into data constraints. Inequality mode bounds each
// statistic in the direction recorded in the fixture (correlators by sign, penalties from above).
std::vector<DataSpec> nietoSillerasConstraints(const Fixture& fixture, ConstraintMode mode);

struct PsdBlock {
    std::string label;
    std::vector<Word> rows;
    std::vector<Affine> entries;  // upper triangle, row-major

    int size() const { return static_cast<int>(rows.size()); }
    std::size_t index(int i, int j) const;
    const Affine& at(int i, int j) const { return entries[index(i, j)]; }
};

struct DataConstraint {
    DataSpec spec;
    Affine form;  // statistic as a function of the moments
};

struct MomentProblem {
    Algebra algebra = Algebra::Projective;
    std::vector<Word> words;      // rows of the main moment matrix
    std::vector<Word> variables;  // canonical moment keys, index = variable id
    std::map<Word, int> varIndex;
    std::vector<PsdBlock> blocks;  // blocks[0] is the moment matrix
    std::vector<Affine> equalities;  // structural, each == 0
    std::vector<DataConstraint> data;
    Affine objective;  // maximized
    double normalization = 1;  // value of the empty-word moment

    int variableCount() const { return static_cast<int>(variables.size()); }
    int inequalityCount() const;
    // Canonical text form: word list, variables and entry map.
    std::string serialize() const;
};

MomentProblem buildBellMomentProblem(const BellScenario& scenario, const LevelSpec& spec, const EventForm& objective,
                                     const std::vector<DataSpec>& data = {});

// Dimension-constrained tracial relaxation. With eveOutcomes > 0, Eve's outcome is
// modelled by central projectors, which splits the relaxation into one block per outcome.
MomentProblem buildPmMomentProblem(const PmScenario& scenario, int dimension, const LevelSpec& spec,
                                   const EventForm& objective, const std::vector<DataSpec>& data = {},
                                   int eveOutcomes = 0);

// Moment value of an event form for given primal moments.
double evaluateMoments(const MomentProblem& p, const Affine& a, const std::vector<double>& x);

}  // namespace povmrand

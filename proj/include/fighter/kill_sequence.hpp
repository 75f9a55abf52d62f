#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fighter {

// Raised when a candidate kill-probability sequence breaks one of the model
// hypotheses. index() is the first offending position (or npos for u / size
// problems).
class InvalidSequence : public std::invalid_argument {
public:
    enum class Kind { NotStartingAtZero, NotIncreasing, NotConcave, OutOfRange, BadParameter };

    InvalidSequence(Kind kind, std::size_t index, const std::string& what)
        : std::invalid_argument(what), kind_(kind), index_(index) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t index() const noexcept { return index_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    Kind kind_;
    std::size_t index_;
};

// Kill probabilities a(0..j_max) together with the counterattack survival
// probability u. Immutable once built; every instance satisfies
//   a(0) = 0, a strictly increasing, a strictly concave, a(j) in [0,1], u in [0,1].
class KillSequence {
public:
    // Relative slack used for the strict concavity test.
    static constexpr double kConcavitySlack = 1e-12;

    // Accepts iff all invariants hold; throws InvalidSequence naming the first
    // violated index otherwise.
    static KillSequence validate(std::vector<double> a, double u);

    // a(j) = 1 - q^j for j = 0..j_max.
    static KillSequence geometric(double q, int j_max, double u);

    // Parses "0,0.5,0.75" style literals (the CLI sequence format).
    static KillSequence parse(const std::string& literal, double u);

    double a(int j) const;
    double u() const noexcept { return u_; }
    int j_max() const noexcept { return static_cast<int>(a_.size()) - 1; }
    const std::vector<double>& values() const noexcept { return a_; }

    // Set when the sequence came from geometric().
    std::optional<double> q() const noexcept { return q_; }

    // Probability of surviving an engagement in which j missiles are spent:
    // c(j) = a(j)(1 - u) + u.
    double survival(int j) const;

    // v(j) = a(j) - c(j)/c(j+1) * a(j+1), for 1 <= j <= j_max - 1.
    double v(int j) const;

    KillSequence with_u(double u) const;

private:
    KillSequence(std::vector<double> a, double u, std::optional<double> q)
        : a_(std::move(a)), u_(u), q_(q) {}

    std::vector<double> a_;
    double u_ = 0.0;
    std::optional<double> q_;
};

}  // namespace fighter

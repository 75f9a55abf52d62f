#include "fighter/kill_sequence.hpp"

#include <cmath>
#include <sstream>

namespace fighter {

namespace {

std::string at(const char* msg, std::size_t j) {
    std::ostringstream os;
    os << msg << " at " << j;
    return os.str();
}

void check_u(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw InvalidSequence(InvalidSequence::Kind::BadParameter, InvalidSequence::npos,
                              "u out of [0,1]");
    }
}

}  // namespace

KillSequence KillSequence::validate(std::vector<double> a, double u) {
    check_u(u);
    if (a.size() < 2) {
        throw InvalidSequence(InvalidSequence::Kind::BadParameter, InvalidSequence::npos,
                              "sequence needs at least a(0) and a(1)");
    }
    if (a[0] != 0.0) {
        throw InvalidSequence(InvalidSequence::Kind::NotStartingAtZero, 0, "not starting at zero");
    }
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (!(a[j] >= 0.0 && a[j] <= 1.0)) {
            throw InvalidSequence(InvalidSequence::Kind::OutOfRange, j, at("out of [0,1]", j));
        }
        if (j + 1 < n && !(a[j + 1] > a[j])) {
            throw InvalidSequence(InvalidSequence::Kind::NotIncreasing, j,
                                  at("not strictly increasing", j));
        }
        if (j + 2 < n) {
            const double d0 = a[j + 1] - a[j];
            const double d1 = a[j + 2] - a[j + 1];
            if (!(d0 - d1 > kConcavitySlack * d0)) {
                throw InvalidSequence(InvalidSequence::Kind::NotConcave, j,
                                      at("not strictly concave", j));
            }
        }
    }
    return KillSequence(std::move(a), u, std::nullopt);
}

KillSequence KillSequence::geometric(double q, int j_max, double u) {
    if (!(q > 0.0 && q < 1.0)) {
        throw InvalidSequence(InvalidSequence::Kind::BadParameter, InvalidSequence::npos,
                              "q out of (0,1)");
    }
    if (j_max < 1) {
        throw InvalidSequence(InvalidSequence::Kind::BadParameter, InvalidSequence::npos,
                              "j_max must be >= 1");
    }
    std::vector<double> a(static_cast<std::size_t>(j_max) + 1);
    for (int j = 0; j <= j_max; ++j) a[j] = 1.0 - std::pow(q, j);
    auto seq = validate(std::move(a), u);
    seq.q_ = q;
    return seq;
}

KillSequence KillSequence::parse(const std::string& literal, double u) {
    std::vector<double> a;
    std::stringstream ss(literal);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used == 0 || used != item.size()) {
            throw InvalidSequence(InvalidSequence::Kind::BadParameter, a.size(),
                                  "malformed sequence literal entry '" + item + "'");
        }
        a.push_back(x);
    }
    return validate(std::move(a), u);
}

double KillSequence::a(int j) const {
    if (j < 0 || j > j_max()) throw std::out_of_range(at("kill index out of range", j));
    return a_[static_cast<std::size_t>(j)];
}

double KillSequence::survival(int j) const {
    if (j < 1 || j > j_max()) throw std::out_of_range(at("survival index out of range", j));
    return a_[static_cast<std::size_t>(j)] * (1.0 - u_) + u_;
}

double KillSequence::v(int j) const {
    if (j < 1 || j >= j_max()) throw std::out_of_range(at("v index out of range", j));
    return a(j) - survival(j) / survival(j + 1) * a(j + 1);
}

KillSequence KillSequence::with_u(double u) const {
    check_u(u);
    return KillSequence(a_, u, q_);
}

}  // namespace fighter

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace osrep {

using cplx = std::complex<double>;

// Machine-readable failure classes.
enum class ErrorCode {
    UnknownGraph,
    InvalidSize,
    IndexMismatch,
    InvalidDimension,
    NotPositive,
    NoDelta,
    BoundTooLarge,
    NotSingular,
    NotRealRoot,
    NotApplicable,
    NonPositiveCharacter,
    NonPositiveModulus,
    ZeroRepresentation,
    NotOrthoscalar,
    CharacterNonpositive,
    RecurrenceNegative,
    ConstraintViolated,
    DegenerateParameters,
    CompletionInfeasible,
    NoSolution,
    ParseError,
    // Internal conditions: must not occur on valid input.
    NoPathFound,
    PathFailure,
    NumericalFailure,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::UnknownGraph:         return "UnknownGraph";
        case ErrorCode::InvalidSize:          return "InvalidSize";
        case ErrorCode::IndexMismatch:        return "IndexMismatch";
        case ErrorCode::InvalidDimension:     return "InvalidDimension";
        case ErrorCode::NotPositive:          return "NotPositive";
        case ErrorCode::NoDelta:              return "NoDelta";
        case ErrorCode::BoundTooLarge:        return "BoundTooLarge";
        case ErrorCode::NotSingular:          return "NotSingular";
        case ErrorCode::NotRealRoot:          return "NotRealRoot";
        case ErrorCode::NotApplicable:        return "NotApplicable";
        case ErrorCode::NonPositiveCharacter: return "NonPositiveCharacter";
        case ErrorCode::NonPositiveModulus:   return "NonPositiveModulus";
        case ErrorCode::ZeroRepresentation:   return "ZeroRepresentation";
        case ErrorCode::NotOrthoscalar:       return "NotOrthoscalar";
        case ErrorCode::CharacterNonpositive: return "CharacterNonpositive";
        case ErrorCode::RecurrenceNegative:   return "RecurrenceNegative";
        case ErrorCode::ConstraintViolated:   return "ConstraintViolated";
        case ErrorCode::DegenerateParameters: return "DegenerateParameters";
        case ErrorCode::CompletionInfeasible: return "CompletionInfeasible";
        case ErrorCode::NoSolution:           return "NoSolution";
        case ErrorCode::ParseError:           return "ParseError";
        case ErrorCode::NoPathFound:          return "NoPathFound";
        case ErrorCode::PathFailure:          return "PathFailure";
        case ErrorCode::NumericalFailure:     return "NumericalFailure";
    }
    return "Unknown";
}

// True for conditions caused by the caller's input rather than by the library.
inline bool is_input_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::NoPathFound:
        case ErrorCode::PathFailure:
        case ErrorCode::NumericalFailure:
            return false;
        default:
            return true;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Numerical knobs shared across the library.
//   constraint:   exact algebraic identities evaluated in floating point
//   ortho:        orthoscalarity defect of constructed representations
//   equivalence:  residuals when matching two representations
//   rank:         relative singular-value cutoff for rank decisions
struct Tolerances {
    double constraint = 1e-12;
    double ortho = 1e-9;
    double equivalence = 1e-8;
    double rank = 1e-9;
};

// Deterministic random streams. std::mt19937_64 has a portable, specified
// output sequence; the distributions below avoid std::uniform_real_distribution
// and friends, whose outputs vary across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed_mix(seed)) {}

    std::uint64_t next_u64() {
        // xorshift* keeps the implementation self-contained and reproducible.
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1Dull;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one value per call, cache the partner.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    cplx gaussian_cplx() {
        double re = gaussian();
        double im = gaussian();
        return cplx(re, im);
    }

private:
    static std::uint64_t seed_mix(std::uint64_t seed) {
        // splitmix64 step; also maps seed 0 away from the xorshift fixed point.
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z = z ^ (z >> 31);
        return z == 0 ? 0x9E3779B97F4A7C15ull : z;
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace osrep

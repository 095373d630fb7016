#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stresscert {

// Elimination hit a structurally singular system. When thrown from the
// certification pipeline, subset() names the vertex labels whose
// extended-position columns failed to span.
class SingularMatrix : public std::runtime_error {
public:
    explicit SingularMatrix(const std::string& msg, std::vector<int> subset = {})
        : std::runtime_error(msg), subset_(std::move(subset)) {}

    const std::vector<int>& subset() const noexcept { return subset_; }

private:
    std::vector<int> subset_;
};

class NotSymmetric : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Points that were required to affinely span R^d do not.
class DegenerateSpan : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vertex/anchor index outside its declared range (a parse-level defect).
class IndexError : public ParseError {
public:
    using ParseError::ParseError;
};

class DimensionMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VerificationFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No valid construction order exists (exhausted == false) or the search
// budget ran out before the question was settled (exhausted == true).
class OrderNotFound : public std::runtime_error {
public:
    explicit OrderNotFound(const std::string& msg, bool exhausted = false)
        : std::runtime_error(msg), exhausted_(exhausted) {}

    bool budget_exhausted() const noexcept { return exhausted_; }

private:
    bool exhausted_;
};

// Instance generation gave up after the configured number of resamples.
class ResampleBudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stresscert

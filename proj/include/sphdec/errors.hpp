#pragma once

#include <stdexcept>
#include <string>

namespace sphdec {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument combinations detected before any computation starts.
class argument_error : public error {
public:
    using error::error;
};

// Input basis does not have full row rank.
class rank_error : public error {
public:
    using error::error;
};

// Triangular matrix with a zero diagonal entry cannot be inverted.
class singular_error : public error {
public:
    using error::error;
};

// Exhaustive search space exceeds the enumerability guard.
class size_error : public error {
public:
    using error::error;
};

// Two algorithms that must agree returned different results.
class mismatch_error : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

} // namespace sphdec

#pragma once

#include <stdexcept>
#include <string>

namespace vspan {

/// A nonzero vector would land outside the truncation window [0, w_max].
/// Raised instead of silently dropping weight: truncation is only allowed
/// to forget components we never need, never to zero out live ones.
struct OutOfWindow : std::runtime_error {
    explicit OutOfWindow(const std::string& m) : std::runtime_error(m) {}
};

/// A composite vector u_n v was requested outside the window, so the
/// product cannot be resolved into basis coordinates.
struct UnresolvableProduct : std::runtime_error {
    explicit UnresolvableProduct(const std::string& m) : std::runtime_error(m) {}
};

/// repeat_reduce was asked to rewrite a pair of modes that is not an
/// adjacent equal-index pair u_{-n} v_{-n}.
struct NotARepeat : std::runtime_error {
    explicit NotARepeat(const std::string& m) : std::runtime_error(m) {}
};

/// A rewrite step produced an expression that fails its own soundness
/// check (evaluation mismatch against the unrewritten input).
struct BadRewrite : std::runtime_error {
    explicit BadRewrite(const std::string& m) : std::runtime_error(m) {}
};

/// The quotient space V/C_n(V) keeps growing up to the window edge, so no
/// finite generating set below the window can be certified.
struct NotCofiniteInWindow : std::runtime_error {
    explicit NotCofiniteInWindow(const std::string& m) : std::runtime_error(m) {}
};

/// A claimed spanning set fails to span some graded piece inside the window.
struct SpanDeficit : std::runtime_error {
    explicit SpanDeficit(const std::string& m) : std::runtime_error(m) {}
};

/// An operation was invoked outside its documented precondition.
struct PreconditionViolation : std::runtime_error {
    explicit PreconditionViolation(const std::string& m) : std::runtime_error(m) {}
};

/// Advisory: the requested computation needs a larger window to certify
/// its answer (stabilization not reached, normal form escapes the window).
struct WindowTooSmall : std::runtime_error {
    explicit WindowTooSmall(const std::string& m) : std::runtime_error(m) {}
};

} // namespace vspan

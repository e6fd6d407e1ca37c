#pragma once

#include <array>
#include <functional>
#include <utility>

namespace wachlab {

// 2x2 matrix with entries (row, column); works for any ring-like entry type.
template <class T>
struct Mat2 {
    std::array<T, 4> m;

    Mat2() = default;
    Mat2(T a, T b, T c, T d) : m{std::move(a), std::move(b), std::move(c), std::move(d)} {}

    T& operator()(int i, int j) { return m[static_cast<std::size_t>(2 * i + j)]; }
    const T& operator()(int i, int j) const { return m[static_cast<std::size_t>(2 * i + j)]; }

    template <class F>
    auto map(F&& f) const -> Mat2<decltype(f(m[0]))> {
        return {f(m[0]), f(m[1]), f(m[2]), f(m[3])};
    }

    friend Mat2 operator+(const Mat2& a, const Mat2& b) {
        return {a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2], a.m[3] + b.m[3]};
    }
    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        return {a.m[0] - b.m[0], a.m[1] - b.m[1], a.m[2] - b.m[2], a.m[3] - b.m[3]};
    }
    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
                a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]};
    }

    T det() const { return m[0] * m[3] - m[1] * m[2]; }
    Mat2 adjugate() const { return {m[3], -m[1], -m[2], m[0]}; }
};

} // namespace wachlab

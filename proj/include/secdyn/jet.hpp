#pragma once

#include <array>
#include <cstddef>

namespace secdyn {

// Truncated Taylor series a[0] + a[1] t + ... + a[N] t^N around a point.
// a[k] is the k-th Taylor coefficient, so the k-th derivative is k! * a[k].
template <class C, int N>
struct Jet {
    std::array<C, N + 1> a{};

    Jet() { a.fill(C(0)); }
    Jet(const C& c) {  // NOLINT: constants promote implicitly
        a.fill(C(0));
        a[0] = c;
    }

    static Jet variable(const C& at) {
        Jet j(at);
        if constexpr (N >= 1) j.a[1] = C(1);
        return j;
    }

    const C& value() const { return a[0]; }

    C derivative(int k) const {
        C out = a[k];
        for (int i = 2; i <= k; ++i) out *= C(i);
        return out;
    }

    Jet operator-() const {
        Jet r;
        for (int i = 0; i <= N; ++i) r.a[i] = -a[i];
        return r;
    }
    Jet& operator+=(const Jet& o) {
        for (int i = 0; i <= N; ++i) a[i] += o.a[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int i = 0; i <= N; ++i) a[i] -= o.a[i];
        return *this;
    }
    friend Jet operator+(Jet l, const Jet& r) { return l += r; }
    friend Jet operator-(Jet l, const Jet& r) { return l -= r; }

    friend Jet operator*(const Jet& l, const Jet& r) {
        Jet out;
        for (int k = 0; k <= N; ++k) {
            C s(0);
            for (int i = 0; i <= k; ++i) s += l.a[i] * r.a[k - i];
            out.a[k] = s;
        }
        return out;
    }

    // Caller checks r.a[0] != 0.
    friend Jet operator/(const Jet& l, const Jet& r) {
        Jet q;
        for (int k = 0; k <= N; ++k) {
            C s = l.a[k];
            for (int j = 1; j <= k; ++j) s -= r.a[j] * q.a[k - j];
            q.a[k] = s / r.a[0];
        }
        return q;
    }
};

}  // namespace secdyn

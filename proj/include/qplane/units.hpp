#pragma once

#include <cmath>
#include <compare>

namespace qplane {

/// Compile-time dimensional analysis over the SI base dimensions this model
/// needs: mass, length, time, current, temperature. Magnitudes are stored in
/// coherent SI units; the exponents live in the type, so adding a voltage to
/// a capacitance or forgetting a unit conversion is a compile error.
template <int MassE, int LengthE, int TimeE, int CurrentE, int TempE>
struct Quantity {
  double value{};  // magnitude in SI base units

  constexpr Quantity() = default;
  explicit constexpr Quantity(double v) : value(v) {}

  [[nodiscard]] constexpr double si() const { return value; }

  constexpr Quantity operator-() const { return Quantity{-value}; }
  constexpr Quantity& operator+=(Quantity other) {
    value += other.value;
    return *this;
  }
  constexpr Quantity& operator-=(Quantity other) {
    value -= other.value;
    return *this;
  }
  constexpr Quantity& operator*=(double s) {
    value *= s;
    return *this;
  }
  constexpr Quantity& operator/=(double s) {
    value /= s;
    return *this;
  }

  friend constexpr Quantity operator+(Quantity a, Quantity b) {
    return Quantity{a.value + b.value};
  }
  friend constexpr Quantity operator-(Quantity a, Quantity b) {
    return Quantity{a.value - b.value};
  }
  friend constexpr Quantity operator*(Quantity a, double s) {
    return Quantity{a.value * s};
  }
  friend constexpr Quantity operator*(double s, Quantity a) {
    return Quantity{a.value * s};
  }
  friend constexpr Quantity operator/(Quantity a, double s) {
    return Quantity{a.value / s};
  }
  friend constexpr auto operator<=>(Quantity a, Quantity b) = default;
};

template <int M1, int L1, int T1, int I1, int K1, int M2, int L2, int T2,
          int I2, int K2>
constexpr Quantity<M1 + M2, L1 + L2, T1 + T2, I1 + I2, K1 + K2>
operator*(Quantity<M1, L1, T1, I1, K1> a, Quantity<M2, L2, T2, I2, K2> b) {
  return Quantity<M1 + M2, L1 + L2, T1 + T2, I1 + I2, K1 + K2>{a.value *
                                                               b.value};
}

template <int M1, int L1, int T1, int I1, int K1, int M2, int L2, int T2,
          int I2, int K2>
constexpr Quantity<M1 - M2, L1 - L2, T1 - T2, I1 - I2, K1 - K2>
operator/(Quantity<M1, L1, T1, I1, K1> a, Quantity<M2, L2, T2, I2, K2> b) {
  return Quantity<M1 - M2, L1 - L2, T1 - T2, I1 - I2, K1 - K2>{a.value /
                                                               b.value};
}

/// Ratio of two like quantities is a plain number.
template <int M, int L, int T, int I, int K>
constexpr double ratio(Quantity<M, L, T, I, K> a, Quantity<M, L, T, I, K> b) {
  return a.value / b.value;
}

template <int M, int L, int T, int I, int K>
  requires(M % 2 == 0 && L % 2 == 0 && T % 2 == 0 && I % 2 == 0 && K % 2 == 0)
constexpr Quantity<M / 2, L / 2, T / 2, I / 2, K / 2> sqrt(
    Quantity<M, L, T, I, K> q) {
  return Quantity<M / 2, L / 2, T / 2, I / 2, K / 2>{std::sqrt(q.value)};
}

using Scalar = Quantity<0, 0, 0, 0, 0>;
using Length = Quantity<0, 1, 0, 0, 0>;
using Area = Quantity<0, 2, 0, 0, 0>;
using Time = Quantity<0, 0, 1, 0, 0>;
using Frequency = Quantity<0, 0, -1, 0, 0>;
using Current = Quantity<0, 0, 0, 1, 0>;
using Charge = Quantity<0, 0, 1, 1, 0>;
using Voltage = Quantity<1, 2, -3, -1, 0>;
using Capacitance = Quantity<-1, -2, 4, 2, 0>;
using Temperature = Quantity<0, 0, 0, 0, 1>;
using Energy = Quantity<1, 2, -2, 0, 0>;
using EntropyPerKelvin = Quantity<1, 2, -2, 0, -1>;  // J/K, for k_B
using CapacitancePerArea = Quantity<-1, -4, 4, 2, 0>;

// CODATA 2018 exact values.
inline constexpr Charge kElementaryCharge{1.602176634e-19};
inline constexpr EntropyPerKelvin kBoltzmann{1.380649e-23};

constexpr Length meters(double v) { return Length{v}; }
constexpr Length millimeters(double v) { return Length{v * 1e-3}; }
constexpr Length micrometers(double v) { return Length{v * 1e-6}; }
constexpr Length nanometers(double v) { return Length{v * 1e-9}; }

constexpr Area square_meters(double v) { return Area{v}; }
constexpr Area square_millimeters(double v) { return Area{v * 1e-6}; }
constexpr Area square_micrometers(double v) { return Area{v * 1e-12}; }

constexpr Voltage volts(double v) { return Voltage{v}; }
constexpr Voltage millivolts(double v) { return Voltage{v * 1e-3}; }
constexpr Voltage microvolts(double v) { return Voltage{v * 1e-6}; }

constexpr Time seconds(double v) { return Time{v}; }
constexpr Time milliseconds(double v) { return Time{v * 1e-3}; }
constexpr Time microseconds(double v) { return Time{v * 1e-6}; }
constexpr Time nanoseconds(double v) { return Time{v * 1e-9}; }

constexpr Frequency hertz(double v) { return Frequency{v}; }
constexpr Frequency megahertz(double v) { return Frequency{v * 1e6}; }

constexpr Temperature kelvin(double v) { return Temperature{v}; }

constexpr Current amperes(double v) { return Current{v}; }
constexpr Current attoamperes(double v) { return Current{v * 1e-18}; }

constexpr Capacitance farads(double v) { return Capacitance{v}; }
constexpr Capacitance picofarads(double v) { return Capacitance{v * 1e-12}; }
constexpr Capacitance femtofarads(double v) { return Capacitance{v * 1e-15}; }

// 1 pF/um^2 happens to equal 1 F/m^2.
constexpr CapacitancePerArea picofarads_per_square_micrometer(double v) {
  return CapacitancePerArea{v};
}

constexpr double as_micrometers(Length l) { return l.value * 1e6; }
constexpr double as_nanometers(Length l) { return l.value * 1e9; }
constexpr double as_millimeters(Length l) { return l.value * 1e3; }
constexpr double as_square_micrometers(Area a) { return a.value * 1e12; }
constexpr double as_square_millimeters(Area a) { return a.value * 1e6; }
constexpr double as_picofarads(Capacitance c) { return c.value * 1e12; }
constexpr double as_femtofarads(Capacitance c) { return c.value * 1e15; }
constexpr double as_microseconds(Time t) { return t.value * 1e6; }
constexpr double as_microvolts(Voltage v) { return v.value * 1e6; }

}  // namespace qplane

//! ABCD (chain) matrix two-port algebra with S-parameter conversion.
//!
//! Conventions: port voltages and currents follow the chain definition
//! `[v1; i1] = M * [v2; i2]` with `i2` flowing out of port 2 into the load.
//! Cascading `first.cascade(&second)` places `first` on the port-1 side.

use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
use num_traits::Float;

/// Magnitude below which conversion and termination denominators are treated
/// as singular.
pub const SINGULAR_EPS: f64 = 1e-15;

/// A frequency in hertz, guaranteed finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub fn from_hz(hz: f64) -> Result<Self, Error> {
        if hz.is_finite() && hz > 0.0 {
            Ok(Self(hz))
        } else {
            Err(Error::InvalidArgument("frequency must be finite and > 0"))
        }
    }

    pub fn from_ghz(ghz: f64) -> Result<Self, Error> {
        Self::from_hz(ghz * 1e9)
    }

    #[must_use]
    pub fn hz(self) -> f64 {
        self.0
    }

    #[must_use]
    pub fn ghz(self) -> f64 {
        self.0 / 1e9
    }

    /// Angular frequency `2*pi*f` in rad/s.
    #[must_use]
    pub fn omega(self) -> f64 {
        2.0 * core::f64::consts::PI * self.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} Hz", self.0)
    }
}

/// Errors from two-port construction and conversion.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidArgument(&'static str),
    /// `|c*z_load + d|` fell below [`SINGULAR_EPS`].
    SingularTermination,
    /// A conversion denominator fell below [`SINGULAR_EPS`].
    SingularConversion,
    EmptySpectrum,
    /// Frequencies must increase strictly; `index` is the first offender.
    NonMonotonicFrequency { index: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::SingularTermination => write!(f, "termination makes the input impedance singular"),
            Error::SingularConversion => write!(f, "conversion denominator is singular"),
            Error::EmptySpectrum => write!(f, "spectrum must contain at least one point"),
            Error::NonMonotonicFrequency { index } => {
                write!(f, "frequencies must increase strictly (offending index {index})")
            }
        }
    }
}

impl core::error::Error for Error {}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// One two-port chain matrix `[[a, b], [c, d]]`; `b` is in ohms, `c` in
/// siemens, `a` and `d` dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcdMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl AbcdMatrix {
    #[must_use]
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    #[must_use]
    pub fn identity() -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    /// Series impedance element `[[1, z], [0, 1]]`.
    pub fn series(z: Complex64) -> Result<Self, Error> {
        if !finite(z) {
            return Err(Error::InvalidArgument("series impedance must be finite"));
        }
        Ok(Self::new(
            Complex64::new(1.0, 0.0),
            z,
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ))
    }

    /// Shunt admittance element `[[1, 0], [y, 1]]`.
    pub fn shunt(y: Complex64) -> Result<Self, Error> {
        if !finite(y) {
            return Err(Error::InvalidArgument("shunt admittance must be finite"));
        }
        Ok(Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            y,
            Complex64::new(1.0, 0.0),
        ))
    }

    /// Chain product with `self` on the port-1 (input) side.
    #[must_use]
    pub fn cascade(&self, rhs: &Self) -> Self {
        Self::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    /// Chain product of a whole chain, input side first; identity when empty.
    #[must_use]
    pub fn cascade_all<'a, I: IntoIterator<Item = &'a AbcdMatrix>>(stages: I) -> Self {
        stages
            .into_iter()
            .fold(Self::identity(), |acc, m| acc.cascade(m))
    }

    /// Determinant `a*d - b*c`; unity for reciprocal networks.
    #[must_use]
    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Impedance seen at port 1 with `z_load` terminating port 2.
    pub fn input_impedance(&self, z_load: Complex64) -> Result<Complex64, Error> {
        if !finite(z_load) {
            return Err(Error::InvalidArgument("load impedance must be finite"));
        }
        if z_load.re < 0.0 {
            return Err(Error::InvalidArgument("load impedance must be passive (re >= 0)"));
        }
        let den = self.c * z_load + self.d;
        if den.norm() < SINGULAR_EPS {
            return Err(Error::SingularTermination);
        }
        Ok((self.a * z_load + self.b) / den)
    }

    /// S-parameters with the same real reference impedance at both ports.
    pub fn to_sparams(&self, z0: f64) -> Result<SMatrix, Error> {
        self.to_sparams_between(z0, z0)
    }

    /// S-parameters with distinct real reference impedances per port
    /// (power-wave normalization).
    pub fn to_sparams_between(&self, z0_in: f64, z0_out: f64) -> Result<SMatrix, Error> {
        check_z0(z0_in)?;
        check_z0(z0_out)?;
        let g = (z0_in * z0_out).sqrt();
        let u = (z0_out / z0_in).sqrt();
        let ta = self.a * u;
        let tb = self.b / g;
        let tc = self.c * g;
        let td = self.d / u;
        let den = ta + tb + tc + td;
        if den.norm() < SINGULAR_EPS {
            return Err(Error::SingularConversion);
        }
        let two = Complex64::new(2.0, 0.0);
        Ok(SMatrix {
            s11: (ta + tb - tc - td) / den,
            s12: two * self.det() / den,
            s21: two / den,
            s22: (-ta + tb - tc + td) / den,
        })
    }

    /// Rebuilds the chain matrix from S-parameters with real references.
    pub fn from_sparams(s: &SMatrix, z0_in: f64, z0_out: f64) -> Result<Self, Error> {
        check_z0(z0_in)?;
        check_z0(z0_out)?;
        if s.s21.norm() < SINGULAR_EPS {
            return Err(Error::SingularConversion);
        }
        let g = (z0_in * z0_out).sqrt();
        let u = (z0_in / z0_out).sqrt();
        let one = Complex64::new(1.0, 0.0);
        let two_s21 = Complex64::new(2.0, 0.0) * s.s21;
        let prod = s.s12 * s.s21;
        let a = ((one + s.s11) * (one - s.s22) + prod) / two_s21 * u;
        let b = ((one + s.s11) * (one + s.s22) - prod) / two_s21 * g;
        let c = ((one - s.s11) * (one - s.s22) - prod) / two_s21 / g;
        let d = ((one - s.s11) * (one + s.s22) + prod) / two_s21 / u;
        Ok(Self::new(a, b, c, d))
    }
}

fn check_z0(z0: f64) -> Result<(), Error> {
    if z0.is_finite() && z0 > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("reference impedance must be finite and > 0"))
    }
}

/// Scale-aware distance between two chain matrices.
///
/// Entries are first made commensurate (`b` divided by `z_scale`, `c`
/// multiplied by it); the result is the largest entry difference divided by
/// the largest scaled entry magnitude (floored at one).
#[must_use]
pub fn abcd_scaled_distance(x: &AbcdMatrix, y: &AbcdMatrix, z_scale: f64) -> f64 {
    let sx = [x.a, x.b / z_scale, x.c * z_scale, x.d];
    let sy = [y.a, y.b / z_scale, y.c * z_scale, y.d];
    let mut diff = 0.0f64;
    let mut mag = 1.0f64;
    for i in 0..4 {
        diff = diff.max((sx[i] - sy[i]).norm());
        mag = mag.max(sx[i].norm()).max(sy[i].norm());
    }
    diff / mag
}

/// One S-parameter matrix at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
}

fn check_monotonic<T>(points: &[(Frequency, T)]) -> Result<(), Error> {
    for (i, pair) in points.windows(2).enumerate() {
        if pair[1].0.hz() <= pair[0].0.hz() {
            return Err(Error::NonMonotonicFrequency { index: i + 1 });
        }
    }
    Ok(())
}

/// A chain-matrix response sampled on a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortSpectrum {
    points: Vec<(Frequency, AbcdMatrix)>,
}

impl TwoPortSpectrum {
    pub fn new(points: Vec<(Frequency, AbcdMatrix)>) -> Result<Self, Error> {
        if points.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        check_monotonic(&points)?;
        Ok(Self { points })
    }

    #[must_use]
    pub fn points(&self) -> &[(Frequency, AbcdMatrix)] {
        &self.points
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Converts every point; both ports share `z0`.
    pub fn to_sparams(&self, z0: f64) -> Result<SParams, Error> {
        self.to_sparams_between(z0, z0)
    }

    pub fn to_sparams_between(&self, z0_in: f64, z0_out: f64) -> Result<SParams, Error> {
        let mut points = Vec::with_capacity(self.points.len());
        for (f, m) in &self.points {
            points.push((*f, m.to_sparams_between(z0_in, z0_out)?));
        }
        SParams::new(points, z0_in, z0_out)
    }
}

/// An S-parameter response sampled on a strictly increasing frequency grid.
///
/// Each port carries its own real reference impedance so that sweeps between
/// unequal source and load levels stay representable; both references are 50
/// ohms in the common case.
#[derive(Debug, Clone, PartialEq)]
pub struct SParams {
    points: Vec<(Frequency, SMatrix)>,
    z0_port1: f64,
    z0_port2: f64,
}

impl SParams {
    pub fn new(points: Vec<(Frequency, SMatrix)>, z0_port1: f64, z0_port2: f64) -> Result<Self, Error> {
        check_z0(z0_port1)?;
        check_z0(z0_port2)?;
        check_monotonic(&points)?;
        Ok(Self {
            points,
            z0_port1,
            z0_port2,
        })
    }

    /// Both ports referenced to the same impedance.
    pub fn with_z0(points: Vec<(Frequency, SMatrix)>, z0: f64) -> Result<Self, Error> {
        Self::new(points, z0, z0)
    }

    #[must_use]
    pub fn points(&self) -> &[(Frequency, SMatrix)] {
        &self.points
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[must_use]
    pub fn z0_port1(&self) -> f64 {
        self.z0_port1
    }

    #[must_use]
    pub fn z0_port2(&self) -> f64 {
        self.z0_port2
    }

    /// Rebuilds the chain-matrix spectrum; fails on any singular point.
    pub fn to_abcd(&self) -> Result<TwoPortSpectrum, Error> {
        let mut points = Vec::with_capacity(self.points.len());
        for (f, s) in &self.points {
            points.push((*f, AbcdMatrix::from_sparams(s, self.z0_port1, self.z0_port2)?));
        }
        TwoPortSpectrum::new(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn series_impedances_accumulate_in_cascade() {
        let m1 = AbcdMatrix::series(c(3.0, 4.0)).unwrap();
        let m2 = AbcdMatrix::series(c(1.0, -2.0)).unwrap();
        let m = m1.cascade(&m2);
        assert_relative_eq!(m.a.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(m.b.re, 4.0, epsilon = 1e-15);
        assert_relative_eq!(m.b.im, 2.0, epsilon = 1e-15);
        assert_eq!(m.c, c(0.0, 0.0));
        assert_relative_eq!(m.d.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cascade_with_identity_is_noop() {
        let m = AbcdMatrix::shunt(c(0.01, 0.02)).unwrap();
        let left = AbcdMatrix::identity().cascade(&m);
        let right = m.cascade(&AbcdMatrix::identity());
        assert_eq!(left, m);
        assert_eq!(right, m);
    }

    #[test]
    fn series_resistor_sparams_match_closed_form() {
        let m = AbcdMatrix::series(c(50.0, 0.0)).unwrap();
        let s = m.to_sparams(50.0).unwrap();
        assert_relative_eq!(s.s11.re, 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(s.s11.im, 0.0, epsilon = 1e-15);
        assert_relative_eq!(s.s21.re, 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(s.s21.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_network_is_a_perfect_through() {
        let s = AbcdMatrix::identity().to_sparams(50.0).unwrap();
        assert!(s.s11.norm() < 1e-15);
        assert!((s.s21 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.s12 - c(1.0, 0.0)).norm() < 1e-15);
        assert!(s.s22.norm() < 1e-15);
    }

    #[test]
    fn ideal_inverter_transforms_load_reciprocally() {
        let inv = AbcdMatrix::new(c(0.0, 0.0), c(0.0, 50.0), c(0.0, 1.0 / 50.0), c(0.0, 0.0));
        let zin = inv.input_impedance(c(100.0, 0.0)).unwrap();
        assert_relative_eq!(zin.re, 25.0, epsilon = 1e-12);
        assert_relative_eq!(zin.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn termination_cancelling_the_denominator_is_singular() {
        // Shunt admittance terminated in exactly -1/y zeroes c*zl + d.
        let y = c(0.0, 0.02);
        let m = AbcdMatrix::shunt(y).unwrap();
        let z_load = -Complex64::new(1.0, 0.0) / y; // purely reactive, re = 0
        assert_eq!(m.input_impedance(z_load), Err(Error::SingularTermination));
    }

    #[test]
    fn negative_real_part_loads_are_rejected() {
        let m = AbcdMatrix::identity();
        assert!(matches!(
            m.input_impedance(c(-1.0, 0.0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sparams_round_trip_through_abcd() {
        let m = AbcdMatrix::series(c(10.0, 25.0))
            .unwrap()
            .cascade(&AbcdMatrix::shunt(c(0.004, -0.013)).unwrap())
            .cascade(&AbcdMatrix::series(c(0.0, -40.0)).unwrap());
        for (z1, z2) in [(50.0, 50.0), (50.0, 75.0), (20.0, 100.0)] {
            let s = m.to_sparams_between(z1, z2).unwrap();
            let back = AbcdMatrix::from_sparams(&s, z1, z2).unwrap();
            assert!(abcd_scaled_distance(&m, &back, 50.0) < 1e-12);
        }
    }

    #[test]
    fn zero_transmission_cannot_convert_back() {
        let s = SMatrix {
            s11: c(1.0, 0.0),
            s12: c(0.0, 0.0),
            s21: c(0.0, 0.0),
            s22: c(1.0, 0.0),
        };
        assert_eq!(
            AbcdMatrix::from_sparams(&s, 50.0, 50.0),
            Err(Error::SingularConversion)
        );
    }

    #[test]
    fn spectrum_rejects_non_monotonic_grids() {
        let f1 = Frequency::from_ghz(1.0).unwrap();
        let f2 = Frequency::from_ghz(2.0).unwrap();
        let id = AbcdMatrix::identity();
        let err = TwoPortSpectrum::new(alloc::vec![(f2, id), (f1, id)]).unwrap_err();
        assert_eq!(err, Error::NonMonotonicFrequency { index: 1 });
        let err = TwoPortSpectrum::new(alloc::vec![(f1, id), (f1, id)]).unwrap_err();
        assert_eq!(err, Error::NonMonotonicFrequency { index: 1 });
    }

    #[test]
    fn spectrum_must_be_non_empty() {
        assert_eq!(
            TwoPortSpectrum::new(alloc::vec![]).unwrap_err(),
            Error::EmptySpectrum
        );
    }

    #[test]
    fn frequencies_must_be_positive_and_finite() {
        assert!(Frequency::from_hz(0.0).is_err());
        assert!(Frequency::from_hz(-1.0).is_err());
        assert!(Frequency::from_hz(f64::NAN).is_err());
        assert!(Frequency::from_ghz(24.0).is_ok());
    }

    #[test]
    fn lossless_two_port_keeps_unit_determinant() {
        let f = Frequency::from_ghz(24.0).unwrap();
        let w = f.omega();
        let m = AbcdMatrix::shunt(c(0.0, w * 132.6e-15))
            .unwrap()
            .cascade(&AbcdMatrix::series(c(0.0, w * 331.6e-12)).unwrap())
            .cascade(&AbcdMatrix::shunt(c(0.0, w * 132.6e-15)).unwrap());
        assert!((m.det() - c(1.0, 0.0)).norm() < 1e-12);
    }
}

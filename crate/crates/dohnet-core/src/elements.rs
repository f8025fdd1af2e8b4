//! Circuit elements with chain-matrix evaluation.
//!
//! Covers single lumped parts, ideal transmission lines and transformers,
//! magnetically coupled inductor pairs, lumped quarter-wave sections, and the
//! leakage/magnetizing transformer model used to realize cascaded lines as
//! one coupled structure. Finite quality factors model dissipation in lumped
//! inductors and capacitors; ideal lines, ideal transformers, and coupled
//! pairs are unaffected by the loss model.

use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::twoport::{AbcdMatrix, Error, Frequency};

fn check_positive(value: f64, what: &'static str) -> Result<(), Error> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(what))
    }
}

/// Quality factors applied to lumped reactive elements.
///
/// `f64::INFINITY` models a lossless part; that is the default. An inductor
/// of reactance `x` gains a series resistance `x / q_l`; a capacitor of
/// susceptance `b` gains a parallel conductance `b / q_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Losses {
    pub q_l: f64,
    pub q_c: f64,
}

impl Losses {
    pub const LOSSLESS: Self = Self {
        q_l: f64::INFINITY,
        q_c: f64::INFINITY,
    };

    pub fn new(q_l: f64, q_c: f64) -> Result<Self, Error> {
        for q in [q_l, q_c] {
            if q.is_nan() || q <= 0.0 {
                return Err(Error::InvalidArgument(
                    "quality factors must be > 0 (infinite means lossless)",
                ));
            }
        }
        Ok(Self { q_l, q_c })
    }

    #[must_use]
    pub fn is_lossless(&self) -> bool {
        self.q_l.is_infinite() && self.q_c.is_infinite()
    }
}

impl Default for Losses {
    fn default() -> Self {
        Self::LOSSLESS
    }
}

/// Series-branch impedance of an inductor `l` (henries) at `f` with quality
/// factor `q_l`.
#[must_use]
pub fn inductor_impedance(l: f64, f: Frequency, q_l: f64) -> Complex64 {
    let x = f.omega() * l;
    Complex64::new(x / q_l, x)
}

/// Shunt-branch admittance of a capacitor `c` (farads) at `f` with quality
/// factor `q_c`.
#[must_use]
pub fn capacitor_admittance(c: f64, f: Frequency, q_c: f64) -> Complex64 {
    let b = f.omega() * c;
    Complex64::new(b / q_c, b)
}

/// One circuit element in a cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    SeriesR(f64),
    SeriesL(f64),
    SeriesC(f64),
    ShuntR(f64),
    ShuntL(f64),
    ShuntC(f64),
    /// Ideal line with electrical length `theta_deg` at `f0`, scaling
    /// linearly with frequency. Positive angles lag like a physical line.
    Tline { z0: f64, theta_deg: f64, f0: Frequency },
    /// Ideal transformer with voltage ratio `n : 1` from port 1 to port 2.
    Transformer { n: f64 },
    /// Magnetically coupled inductor pair (primary `lp`, secondary `ls`,
    /// coupling `0 < k <= 1`).
    Coupled { lp: f64, ls: f64, k: f64 },
}

impl Element {
    /// Chain matrix at `f` with lossless parts.
    pub fn abcd(&self, f: Frequency) -> Result<AbcdMatrix, Error> {
        self.abcd_lossy(f, &Losses::LOSSLESS)
    }

    /// Chain matrix at `f`; `losses` applies to lumped inductors and
    /// capacitors only.
    pub fn abcd_lossy(&self, f: Frequency, losses: &Losses) -> Result<AbcdMatrix, Error> {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Element::SeriesR(r) => {
                check_positive(r, "resistance must be finite and > 0")?;
                AbcdMatrix::series(Complex64::new(r, 0.0))
            }
            Element::SeriesL(l) => {
                check_positive(l, "inductance must be finite and > 0")?;
                AbcdMatrix::series(inductor_impedance(l, f, losses.q_l))
            }
            Element::SeriesC(c) => {
                check_positive(c, "capacitance must be finite and > 0")?;
                AbcdMatrix::series(one / capacitor_admittance(c, f, losses.q_c))
            }
            Element::ShuntR(r) => {
                check_positive(r, "resistance must be finite and > 0")?;
                AbcdMatrix::shunt(Complex64::new(1.0 / r, 0.0))
            }
            Element::ShuntL(l) => {
                check_positive(l, "inductance must be finite and > 0")?;
                AbcdMatrix::shunt(one / inductor_impedance(l, f, losses.q_l))
            }
            Element::ShuntC(c) => {
                check_positive(c, "capacitance must be finite and > 0")?;
                AbcdMatrix::shunt(capacitor_admittance(c, f, losses.q_c))
            }
            Element::Tline { z0, theta_deg, f0 } => {
                check_positive(z0, "line impedance must be finite and > 0")?;
                if !theta_deg.is_finite() {
                    return Err(Error::InvalidArgument("electrical length must be finite"));
                }
                let theta = theta_deg * (f.hz() / f0.hz()) * core::f64::consts::PI / 180.0;
                let (sin, cos) = theta.sin_cos();
                Ok(AbcdMatrix::new(
                    Complex64::new(cos, 0.0),
                    Complex64::new(0.0, z0 * sin),
                    Complex64::new(0.0, sin / z0),
                    Complex64::new(cos, 0.0),
                ))
            }
            Element::Transformer { n } => {
                check_positive(n, "turns ratio must be finite and > 0")?;
                Ok(ideal_transformer_abcd(n))
            }
            Element::Coupled { lp, ls, k } => {
                check_positive(lp, "primary inductance must be finite and > 0")?;
                check_positive(ls, "secondary inductance must be finite and > 0")?;
                if !(k.is_finite() && k > 0.0 && k <= 1.0) {
                    return Err(Error::InvalidArgument("coupling must satisfy 0 < k <= 1"));
                }
                let m = k * (lp * ls).sqrt();
                let w = f.omega();
                Ok(AbcdMatrix::new(
                    Complex64::new(lp / m, 0.0),
                    Complex64::new(0.0, w * (lp * ls - m * m) / m),
                    Complex64::new(0.0, -1.0 / (w * m)),
                    Complex64::new(ls / m, 0.0),
                ))
            }
        }
    }
}

/// Chain matrix of an ideal `n : 1` transformer.
#[must_use]
pub fn ideal_transformer_abcd(n: f64) -> AbcdMatrix {
    AbcdMatrix::new(
        Complex64::new(n, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0 / n, 0.0),
    )
}

/// Chain matrix of a cascade of elements, input side first.
pub fn cascade_abcd(elements: &[Element], f: Frequency, losses: &Losses) -> Result<AbcdMatrix, Error> {
    let mut acc = AbcdMatrix::identity();
    for element in elements {
        acc = acc.cascade(&element.abcd_lossy(f, losses)?);
    }
    Ok(acc)
}

/// Topology of a lumped quarter-wave section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuarterWaveKind {
    /// Shunt C, series L, shunt C; lags 90 degrees at center.
    PiClc,
    /// Shunt L, series C, shunt L; leads 90 degrees at center.
    PiLcl,
    /// Series L, shunt C, series L; lags 90 degrees at center.
    TeeLcl,
}

/// A lumped section that reproduces a quarter-wave line of impedance `z0`
/// exactly at its center frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarterWaveEquiv {
    pub kind: QuarterWaveKind,
    pub z0: f64,
    pub f0: Frequency,
    /// Inductance `z0 / omega0` in henries.
    pub l: f64,
    /// Capacitance `1 / (omega0 * z0)` in farads.
    pub c: f64,
}

/// Builds the lumped quarter-wave section for `z0` centered at `f0`.
pub fn quarter_wave_equiv(
    kind: QuarterWaveKind,
    z0: f64,
    f0: Frequency,
) -> Result<QuarterWaveEquiv, Error> {
    check_positive(z0, "line impedance must be finite and > 0")?;
    let w0 = f0.omega();
    Ok(QuarterWaveEquiv {
        kind,
        z0,
        f0,
        l: z0 / w0,
        c: 1.0 / (w0 * z0),
    })
}

impl QuarterWaveEquiv {
    /// The three lumped parts, input side first.
    #[must_use]
    pub fn elements(&self) -> [Element; 3] {
        match self.kind {
            QuarterWaveKind::PiClc => [
                Element::ShuntC(self.c),
                Element::SeriesL(self.l),
                Element::ShuntC(self.c),
            ],
            QuarterWaveKind::PiLcl => [
                Element::ShuntL(self.l),
                Element::SeriesC(self.c),
                Element::ShuntL(self.l),
            ],
            QuarterWaveKind::TeeLcl => [
                Element::SeriesL(self.l),
                Element::ShuntC(self.c),
                Element::SeriesL(self.l),
            ],
        }
    }

    pub fn abcd(&self, f: Frequency) -> Result<AbcdMatrix, Error> {
        self.abcd_lossy(f, &Losses::LOSSLESS)
    }

    pub fn abcd_lossy(&self, f: Frequency, losses: &Losses) -> Result<AbcdMatrix, Error> {
        cascade_abcd(&self.elements(), f, losses)
    }

    /// The exact center-frequency target: an ideal impedance inverter with a
    /// 90-degree lag (`PiClc`, `TeeLcl`) or lead (`PiLcl`).
    #[must_use]
    pub fn ideal_inverter_abcd(&self) -> AbcdMatrix {
        let sign = match self.kind {
            QuarterWaveKind::PiClc | QuarterWaveKind::TeeLcl => 1.0,
            QuarterWaveKind::PiLcl => -1.0,
        };
        AbcdMatrix::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, sign * self.z0),
            Complex64::new(0.0, sign / self.z0),
            Complex64::new(0.0, 0.0),
        )
    }
}

/// Leakage/magnetizing model of a coupled transformer: series leakage
/// inductance `lk`, optional series capacitance, shunt magnetizing
/// inductance `lm`, then an ideal `n : 1` transformer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformerModel {
    pub lm: f64,
    pub lk: f64,
    pub n: f64,
    pub series_cap: Option<f64>,
}

impl TransformerModel {
    pub fn new(lm: f64, lk: f64, n: f64, series_cap: Option<f64>) -> Result<Self, Error> {
        check_positive(lm, "magnetizing inductance must be finite and > 0")?;
        if !(lk.is_finite() && lk >= 0.0) {
            return Err(Error::InvalidArgument("leakage inductance must be finite and >= 0"));
        }
        check_positive(n, "turns ratio must be finite and > 0")?;
        if let Some(c) = series_cap {
            check_positive(c, "series capacitance must be finite and > 0")?;
        }
        Ok(Self {
            lm,
            lk,
            n,
            series_cap,
        })
    }

    /// Rewrites a coupled inductor pair into the leakage/magnetizing form;
    /// the two descriptions have identical chain matrices at every frequency.
    pub fn from_coupled(lp: f64, ls: f64, k: f64) -> Result<Self, Error> {
        check_positive(lp, "primary inductance must be finite and > 0")?;
        check_positive(ls, "secondary inductance must be finite and > 0")?;
        if !(k.is_finite() && k > 0.0 && k <= 1.0) {
            return Err(Error::InvalidArgument("coupling must satisfy 0 < k <= 1"));
        }
        Self::new(k * k * lp, (1.0 - k * k) * lp, k * (lp / ls).sqrt(), None)
    }

    /// Coupling factor `sqrt(lm / (lm + lk))`.
    #[must_use]
    pub fn k(&self) -> f64 {
        (self.lm / (self.lm + self.lk)).sqrt()
    }

    #[must_use]
    pub fn primary_inductance(&self) -> f64 {
        self.lm + self.lk
    }

    #[must_use]
    pub fn secondary_inductance(&self) -> f64 {
        self.lm / (self.n * self.n)
    }

    /// The equivalent physical winding pair (drops any series capacitor).
    #[must_use]
    pub fn coupled_equivalent(&self) -> Element {
        Element::Coupled {
            lp: self.primary_inductance(),
            ls: self.secondary_inductance(),
            k: self.k(),
        }
    }

    /// The model as a cascade, input side first. A zero leakage inductance
    /// contributes no series element.
    #[must_use]
    pub fn elements(&self) -> Vec<Element> {
        let mut chain = Vec::with_capacity(4);
        if self.lk > 0.0 {
            chain.push(Element::SeriesL(self.lk));
        }
        if let Some(c) = self.series_cap {
            chain.push(Element::SeriesC(c));
        }
        chain.push(Element::ShuntL(self.lm));
        chain.push(Element::Transformer { n: self.n });
        chain
    }

    pub fn abcd(&self, f: Frequency) -> Result<AbcdMatrix, Error> {
        self.abcd_lossy(f, &Losses::LOSSLESS)
    }

    pub fn abcd_lossy(&self, f: Frequency, losses: &Losses) -> Result<AbcdMatrix, Error> {
        cascade_abcd(&self.elements(), f, losses)
    }
}

//! Synthesis of a transformer-based series combining network.
//!
//! The network joins a main and an auxiliary amplifier branch and carries the
//! combined signal to an antenna port through three lumped quarter-wave
//! sections and an output transformer:
//!
//! 1. a tee-topology impedance inverter whose two series inductors are the
//!    physical combining traces at the summing node,
//! 2. a lagging pi section (shunt C, series L, shunt C) whose input
//!    capacitor can absorb the main device's output capacitance,
//! 3. a leading pi section (shunt L, series C, shunt L) of opposite phase,
//! 4. an ideal transformer that shifts the antenna impedance to the device
//!    optimum level.
//!
//! At the center frequency the middle shunt capacitor of section 2 and the
//! input shunt inductor of section 3 resonate when both sections share one
//! impedance; dropping that resonant pair compacts sections 2 and 3 plus the
//! output transformer into a single leakage/magnetizing transformer model
//! that a physical coupled winding pair can realize.

use core::fmt;

use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::elements::{
    cascade_abcd, quarter_wave_equiv, Element, Losses, QuarterWaveEquiv, QuarterWaveKind,
    TransformerModel,
};
use crate::twoport::{AbcdMatrix, Error, Frequency};

/// Design inputs: center frequency, impedance plan, and device parasitics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DohertyDesign {
    pub f0: Frequency,
    /// Load the main device wants to see at back-off, in ohms.
    pub z_opt: f64,
    /// Antenna (system) impedance in ohms.
    pub z_ant: f64,
    /// Impedance of the combining-node inverter.
    pub z_inv: f64,
    /// Impedance of the lagging pi section.
    pub z_line1: f64,
    /// Impedance of the leading pi section.
    pub z_line2: f64,
    /// Main device output capacitance to absorb, in farads.
    pub c_out_main: f64,
    /// Auxiliary device output capacitance, in farads. Recorded for
    /// reporting; the ideal combining model does not consume it.
    pub c_out_aux: f64,
}

impl Default for DohertyDesign {
    fn default() -> Self {
        Self {
            f0: Frequency::from_ghz(24.0).expect("24 GHz is a valid frequency"),
            z_opt: 50.0,
            z_ant: 50.0,
            z_inv: 50.0,
            z_line1: 50.0,
            z_line2: 50.0,
            c_out_main: 0.0,
            c_out_aux: 0.0,
        }
    }
}

/// Errors from network synthesis.
#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    Invalid(Error),
    /// The requested device capacitance exceeds what the input shunt
    /// capacitor of the lagging pi section can absorb.
    ExcessDeviceCapacitance {
        requested_farads: f64,
        absorbable_farads: f64,
    },
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::Invalid(e) => write!(f, "{e}"),
            SynthError::ExcessDeviceCapacitance {
                requested_farads,
                absorbable_farads,
            } => write!(
                f,
                "device capacitance {requested_farads} F exceeds the {absorbable_farads} F \
                 available in the input shunt capacitor"
            ),
        }
    }
}

impl core::error::Error for SynthError {}

impl From<Error> for SynthError {
    fn from(e: Error) -> Self {
        SynthError::Invalid(e)
    }
}

/// Impedance transformation severity between two resistance levels: the
/// ratio of the larger to the smaller, so 1.0 means no transformation.
/// Both arguments must be finite and positive.
#[must_use]
pub fn itr(z_a: f64, z_b: f64) -> f64 {
    let r = z_a / z_b;
    r.max(1.0 / r)
}

/// Back-off load target of a conventional parallel combiner delivering the
/// same power: `2 * z_opt^2 / z_ant` ohms. The series network replaces this
/// with the antenna impedance itself, which is the bandwidth advantage.
#[must_use]
pub fn textbook_parallel_baseline(z_opt: f64, z_ant: f64) -> f64 {
    2.0 * z_opt * z_opt / z_ant
}

/// Impedance transformation comparison at the two drive extremes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItrReport {
    /// Load the main device needs at back-off (`z_opt`).
    pub z_required_pbo: f64,
    /// Load the main device needs at full drive (`z_opt / 2`).
    pub z_required_peak: f64,
    /// Resistance the synthesized network presents at the main plane at the
    /// center frequency with the auxiliary branch open.
    pub z_available: f64,
    /// Transformation severity antenna-to-main at back-off.
    pub itr_pbo: f64,
    /// Transformation severity antenna-to-main at full drive.
    pub itr_peak: f64,
}

/// A synthesized combining network with both the element-ladder view and the
/// compacted transformer realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedNetwork {
    pub design: DohertyDesign,
    /// Tee inverter at the combining node.
    pub inverter: QuarterWaveEquiv,
    /// Lagging pi section (shunt C, series L, shunt C).
    pub line1: QuarterWaveEquiv,
    /// Leading pi section (shunt L, series C, shunt L).
    pub line2: QuarterWaveEquiv,
    /// The two series inductors of the tee inverter: the physical traces
    /// joining the main and auxiliary branches, in henries.
    pub combining_trace_inductors: (f64, f64),
    /// Device capacitance swallowed by the input shunt capacitor, in farads.
    pub absorbed_device_cap: f64,
    /// Input shunt capacitance left after absorption, in farads.
    pub remaining_input_cap: f64,
    /// Center-frequency admittance of the internal resonant pair that the
    /// compaction drops; zero exactly when the two pi sections share one
    /// impedance.
    pub neutralization_residual_y: Complex64,
    pub neutralization_exact: bool,
    /// Compacted realization of both pi sections and the output transformer.
    pub transformer: TransformerModel,
    pub itr: ItrReport,
}

/// Builds the combining network for `design`.
pub fn synthesize(design: &DohertyDesign) -> Result<SynthesizedNetwork, SynthError> {
    for z in [design.z_opt, design.z_ant] {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidArgument("impedances must be finite and > 0").into());
        }
    }
    for c in [design.c_out_main, design.c_out_aux] {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidArgument("device capacitances must be finite and >= 0").into());
        }
    }

    let inverter = quarter_wave_equiv(QuarterWaveKind::TeeLcl, design.z_inv, design.f0)?;
    let line1 = quarter_wave_equiv(QuarterWaveKind::PiClc, design.z_line1, design.f0)?;
    let line2 = quarter_wave_equiv(QuarterWaveKind::PiLcl, design.z_line2, design.f0)?;

    let absorbable = line1.c;
    if design.c_out_main > absorbable {
        return Err(SynthError::ExcessDeviceCapacitance {
            requested_farads: design.c_out_main,
            absorbable_farads: absorbable,
        });
    }
    let remaining = absorbable - design.c_out_main;

    let residual_b = 1.0 / design.z_line1 - 1.0 / design.z_line2;
    let neutralization_residual_y = Complex64::new(0.0, residual_b);

    let n = (design.z_ant / design.z_opt).sqrt();
    let transformer = TransformerModel::new(line2.l, line1.l, n, Some(line2.c))?;

    let mut network = SynthesizedNetwork {
        design: *design,
        inverter,
        line1,
        line2,
        combining_trace_inductors: (inverter.l, inverter.l),
        absorbed_device_cap: design.c_out_main,
        remaining_input_cap: remaining,
        neutralization_residual_y,
        neutralization_exact: residual_b == 0.0,
        transformer,
        itr: ItrReport {
            z_required_pbo: design.z_opt,
            z_required_peak: design.z_opt / 2.0,
            z_available: f64::NAN,
            itr_pbo: itr(design.z_opt, design.z_ant),
            itr_peak: itr(design.z_opt / 2.0, design.z_ant),
        },
    };
    network.itr.z_available = network.backoff_input_impedance(design.f0)?.re;
    Ok(network)
}

impl SynthesizedNetwork {
    /// The tee inverter between the main plane and the combining node.
    #[must_use]
    pub fn inverter_elements(&self) -> [Element; 3] {
        self.inverter.elements()
    }

    /// The ladder from the combining node to the antenna, uncompacted.
    ///
    /// With `include_device_cap` the input shunt capacitor carries its full
    /// design value, modeling the network with the absorbed device
    /// capacitance present; without it only the fabricated remainder.
    #[must_use]
    pub fn output_elements(&self, include_device_cap: bool) -> Vec<Element> {
        let mut chain = Vec::with_capacity(8);
        self.push_input_cap(&mut chain, include_device_cap);
        chain.push(Element::SeriesL(self.line1.l));
        chain.push(Element::ShuntC(self.line1.c));
        chain.push(Element::ShuntL(self.line2.l));
        chain.push(Element::SeriesC(self.line2.c));
        chain.push(Element::ShuntL(self.line2.l));
        chain.push(Element::Transformer {
            n: self.transformer.n,
        });
        chain
    }

    /// The ladder from the combining node to the antenna with the internal
    /// resonant pair dropped: input capacitor plus the transformer model.
    #[must_use]
    pub fn compact_output_elements(&self, include_device_cap: bool) -> Vec<Element> {
        let mut chain = Vec::with_capacity(5);
        self.push_input_cap(&mut chain, include_device_cap);
        chain.extend(self.transformer.elements());
        chain
    }

    fn push_input_cap(&self, chain: &mut Vec<Element>, include_device_cap: bool) {
        let c = if include_device_cap {
            self.line1.c
        } else {
            self.remaining_input_cap
        };
        if c > 0.0 {
            chain.push(Element::ShuntC(c));
        }
    }

    /// Full main-plane-to-antenna ladder, uncompacted.
    #[must_use]
    pub fn ladder_elements(&self, include_device_cap: bool) -> Vec<Element> {
        let mut chain = Vec::with_capacity(11);
        chain.extend(self.inverter_elements());
        chain.extend(self.output_elements(include_device_cap));
        chain
    }

    /// Full main-plane-to-antenna ladder with the compacted transformer.
    #[must_use]
    pub fn compact_elements(&self, include_device_cap: bool) -> Vec<Element> {
        let mut chain = Vec::with_capacity(8);
        chain.extend(self.inverter_elements());
        chain.extend(self.compact_output_elements(include_device_cap));
        chain
    }

    pub fn ladder_abcd(
        &self,
        f: Frequency,
        include_device_cap: bool,
        losses: &Losses,
    ) -> Result<AbcdMatrix, Error> {
        cascade_abcd(&self.ladder_elements(include_device_cap), f, losses)
    }

    pub fn compact_abcd(
        &self,
        f: Frequency,
        include_device_cap: bool,
        losses: &Losses,
    ) -> Result<AbcdMatrix, Error> {
        cascade_abcd(&self.compact_elements(include_device_cap), f, losses)
    }

    /// Impedance at the main plane with the auxiliary branch open and the
    /// antenna terminated, device capacitance included.
    pub fn backoff_input_impedance(&self, f: Frequency) -> Result<Complex64, Error> {
        self.ladder_abcd(f, true, &Losses::LOSSLESS)?
            .input_impedance(Complex64::new(self.design.z_ant, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twoport::abcd_scaled_distance;
    use approx::assert_relative_eq;

    fn reference() -> SynthesizedNetwork {
        synthesize(&DohertyDesign::default()).unwrap()
    }

    #[test]
    fn reference_network_element_values() {
        let net = reference();
        assert_relative_eq!(net.inverter.l, 331.57e-12, max_relative = 1e-4);
        assert_relative_eq!(net.inverter.c, 132.63e-15, max_relative = 1e-4);
        assert_eq!(net.combining_trace_inductors.0, net.inverter.l);
        assert_relative_eq!(net.transformer.lk, 331.57e-12, max_relative = 1e-4);
        assert_relative_eq!(net.transformer.lm, 331.57e-12, max_relative = 1e-4);
        assert_relative_eq!(net.transformer.series_cap.unwrap(), 132.63e-15, max_relative = 1e-4);
        assert_relative_eq!(net.transformer.k(), 0.5f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(net.transformer.n, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn backoff_impedance_equals_the_optimum_at_center() {
        let net = reference();
        let zin = net.backoff_input_impedance(net.design.f0).unwrap();
        assert_relative_eq!(zin.re, 50.0, epsilon = 1e-9);
        assert!(zin.im.abs() < 1e-9);
    }

    #[test]
    fn backoff_impedance_follows_the_line_impedance_plan() {
        let design = DohertyDesign {
            z_inv: 40.0,
            z_line1: 60.0,
            z_line2: 35.0,
            z_ant: 75.0,
            z_opt: 50.0,
            ..DohertyDesign::default()
        };
        let net = synthesize(&design).unwrap();
        let zin = net.backoff_input_impedance(design.f0).unwrap();
        let n_sq = design.z_ant / design.z_opt;
        let expect = design.z_inv * design.z_inv * design.z_line2 * design.z_line2
            / (design.z_line1 * design.z_line1 * n_sq * design.z_ant);
        assert_relative_eq!(zin.re, expect, max_relative = 1e-9);
        assert!(zin.im.abs() / expect < 1e-9);
    }

    #[test]
    fn absorption_conserves_the_input_capacitor() {
        let design = DohertyDesign {
            c_out_main: 60e-15,
            ..DohertyDesign::default()
        };
        let net = synthesize(&design).unwrap();
        assert_eq!(net.absorbed_device_cap, 60e-15);
        assert!((net.absorbed_device_cap + net.remaining_input_cap - net.line1.c).abs() < 1e-28);
    }

    #[test]
    fn absorbing_the_entire_capacitor_leaves_zero() {
        let limit = reference().line1.c;
        let design = DohertyDesign {
            c_out_main: limit,
            ..DohertyDesign::default()
        };
        let net = synthesize(&design).unwrap();
        assert_eq!(net.remaining_input_cap, 0.0);
        assert!(matches!(
            net.output_elements(false)[0],
            Element::SeriesL(_)
        ));
        assert!(matches!(net.output_elements(true)[0], Element::ShuntC(_)));
    }

    #[test]
    fn excess_capacitance_is_rejected_with_the_limit() {
        let design = DohertyDesign {
            c_out_main: 150e-15,
            ..DohertyDesign::default()
        };
        match synthesize(&design) {
            Err(SynthError::ExcessDeviceCapacitance {
                requested_farads,
                absorbable_farads,
            }) => {
                assert_eq!(requested_farads, 150e-15);
                assert_relative_eq!(absorbable_farads, 132.63e-15, max_relative = 1e-4);
            }
            other => panic!("expected capacitance rejection, got {other:?}"),
        }
    }

    #[test]
    fn neutralization_residual_vanishes_only_when_impedances_match() {
        let matched = reference();
        assert!(matched.neutralization_exact);
        assert_eq!(matched.neutralization_residual_y, Complex64::new(0.0, 0.0));

        let skewed = synthesize(&DohertyDesign {
            z_line1: 45.0,
            z_line2: 55.0,
            ..DohertyDesign::default()
        })
        .unwrap();
        assert!(!skewed.neutralization_exact);
        assert_relative_eq!(
            skewed.neutralization_residual_y.im,
            1.0 / 45.0 - 1.0 / 55.0,
            epsilon = 1e-18
        );
    }

    #[test]
    fn compaction_is_exact_at_center_for_matched_sections() {
        let net = reference();
        let f0 = net.design.f0;
        let ladder = net.ladder_abcd(f0, true, &Losses::LOSSLESS).unwrap();
        let compact = net.compact_abcd(f0, true, &Losses::LOSSLESS).unwrap();
        assert!(abcd_scaled_distance(&ladder, &compact, 50.0) < 1e-12);
    }

    #[test]
    fn compaction_tracks_the_ladder_across_the_band() {
        let net = reference();
        for step in 0..=20 {
            let f = Frequency::from_ghz(24.0 * (0.95 + 0.005 * f64::from(step))).unwrap();
            let s_ladder = net
                .ladder_abcd(f, true, &Losses::LOSSLESS)
                .unwrap()
                .to_sparams(50.0)
                .unwrap();
            let s_compact = net
                .compact_abcd(f, true, &Losses::LOSSLESS)
                .unwrap()
                .to_sparams(50.0)
                .unwrap();
            let diff_db = 20.0 * (s_ladder.s21.norm() / s_compact.s21.norm()).log10();
            assert!(
                diff_db.abs() <= 0.1,
                "compaction drifts {diff_db} dB at {f}"
            );
        }
    }

    #[test]
    fn center_frequency_response_is_reflectionless() {
        let net = reference();
        let s = net
            .compact_abcd(net.design.f0, true, &Losses::LOSSLESS)
            .unwrap()
            .to_sparams_between(net.design.z_opt, net.design.z_ant)
            .unwrap();
        assert!(s.s11.norm() < 1e-12);
        assert_relative_eq!(s.s21.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn itr_report_prefers_the_series_architecture() {
        let net = reference();
        assert_relative_eq!(net.itr.z_available, 50.0, epsilon = 1e-9);
        assert_eq!(net.itr.z_required_pbo, 50.0);
        assert_eq!(net.itr.z_required_peak, 25.0);
        assert_relative_eq!(net.itr.itr_pbo, 1.0, epsilon = 1e-15);
        assert_relative_eq!(net.itr.itr_peak, 2.0, epsilon = 1e-15);
        let baseline = textbook_parallel_baseline(50.0, 50.0);
        assert_relative_eq!(baseline, 100.0, epsilon = 1e-12);
        assert_relative_eq!(itr(baseline, 50.0), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_invalid_designs() {
        assert!(synthesize(&DohertyDesign {
            z_opt: 0.0,
            ..DohertyDesign::default()
        })
        .is_err());
        assert!(synthesize(&DohertyDesign {
            z_inv: -50.0,
            ..DohertyDesign::default()
        })
        .is_err());
        assert!(synthesize(&DohertyDesign {
            c_out_main: -1e-15,
            ..DohertyDesign::default()
        })
        .is_err());
    }

    #[test]
    fn aux_capacitance_is_recorded_but_not_consumed() {
        let with_aux = synthesize(&DohertyDesign {
            c_out_aux: 80e-15,
            ..DohertyDesign::default()
        })
        .unwrap();
        let without = reference();
        assert_eq!(with_aux.design.c_out_aux, 80e-15);
        assert_eq!(with_aux.remaining_input_cap, without.remaining_input_cap);
        assert_eq!(
            with_aux.ladder_elements(true),
            without.ladder_elements(true)
        );
    }
}

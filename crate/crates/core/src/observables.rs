//! Synchronization diagnostics.
//!
//! The order parameter is the Frobenius norm of the ensemble average divided by `√rank`, where
//! `rank` is the number of unit singular values of a BS-boundary point. With this scale `r = 1`
//! exactly at consensus on every boundary. The coupling is not included.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cxmat::CMat;
use crate::domains::{boundary_rank, nullity_lenient, on_bs_boundary, BoundaryClass, DomainSpec};
use crate::error::{Error, Result};
use crate::flows::{mean_field, EnsembleState};

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRecord {
    pub time: f64,
    pub r: f64,
    pub spread: f64,
    /// Boundary class of each oscillator, counted leniently (see [`nullity_lenient`]).
    pub ranks: Vec<usize>,
    /// `‖𝒵‖_F` including the coupling.
    pub mean_field_norm: f64,
}

impl ObservableRecord {
    pub fn compute(spec: &DomainSpec, ens: &EnsembleState, kappa: f64, rank_tol: f64) -> Result<Self> {
        let ranks = ens
            .oscillators
            .iter()
            .map(|z| nullity_lenient(spec, z, rank_tol))
            .collect::<Result<Vec<_>>>()?;
        let moment = mean_field(ens, 1.0)?;
        Ok(Self {
            time: ens.time,
            r: normalized(spec, &moment.z),
            spread: pairwise_spread(ens),
            ranks,
            mean_field_norm: moment.z.frobenius_norm() * kappa.abs(),
        })
    }
}

fn normalized(spec: &DomainSpec, moment: &CMat) -> f64 {
    moment.frobenius_norm() / (spec.bs_rank() as f64).sqrt()
}

/// `‖(1/N) Σ z^J‖_F / √rank`. All oscillators must share a boundary component.
pub fn order_parameter(spec: &DomainSpec, ens: &EnsembleState, tol: f64) -> Result<f64> {
    let mut first = None;
    for z in &ens.oscillators {
        let t = nullity_lenient(spec, z, tol)?;
        match first {
            None => first = Some(t),
            Some(t0) if t0 != t => return Err(Error::MixedComponents),
            _ => {}
        }
    }
    Ok(normalized(spec, &mean_field(ens, 1.0)?.z))
}

/// Largest pairwise Frobenius distance; zero for fewer than two oscillators.
pub fn pairwise_spread(ens: &EnsembleState) -> f64 {
    let zs = &ens.oscillators;
    let mut best = 0.0_f64;
    for j in 0..zs.len() {
        for k in j + 1..zs.len() {
            best = best.max((&zs[j] - &zs[k]).frobenius_norm());
        }
    }
    best
}

/// Classification of one oscillator within the family chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainEntry {
    pub class: BoundaryClass,
    /// Domain of the component after projection; `None` on the BS boundary.
    pub sub_domain: Option<DomainSpec>,
    pub on_bs: bool,
}

pub fn chain_report(spec: &DomainSpec, ens: &EnsembleState, tol: f64) -> Result<Vec<ChainEntry>> {
    ens.oscillators
        .iter()
        .map(|z| {
            let class = boundary_rank(spec, z, tol)?;
            let sub_domain = if class.t() == 0 {
                Some(*spec)
            } else {
                spec.reduced(class.t())
            };
            Ok(ChainEntry {
                class,
                sub_domain,
                on_bs: on_bs_boundary(spec, z, tol)?,
            })
        })
        .collect()
}

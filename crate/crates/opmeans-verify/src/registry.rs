//! The table of verifiable properties: stable ids, a one-line summary, the
//! checker pair, and whether the property is a designed negative control
//! (expected to fail) or reports a rejection-sampling acceptance rate.

use crate::checks::{barycenter, functional, powermaps, spectral_order, traceforms};
use crate::{MarginFn, SampleFn};

pub struct PropertyDef {
    pub id: &'static str,
    pub summary: &'static str,
    /// True for properties designed to fail (falsity demonstrations).
    pub negative_control: bool,
    /// True for rejection samplers whose acceptance rate is reported.
    pub reports_acceptance: bool,
    pub sample: SampleFn,
    pub margin: MarginFn,
}

macro_rules! prop {
    ($id:literal, $summary:literal, $module:ident :: $sample:ident / $margin:ident) => {
        PropertyDef {
            id: $id,
            summary: $summary,
            negative_control: false,
            reports_acceptance: false,
            sample: $module::$sample,
            margin: $module::$margin,
        }
    };
    (control $id:literal, $summary:literal, $module:ident :: $sample:ident / $margin:ident) => {
        PropertyDef {
            id: $id,
            summary: $summary,
            negative_control: true,
            reports_acceptance: false,
            sample: $module::$sample,
            margin: $module::$margin,
        }
    };
    (rejection $id:literal, $summary:literal, $module:ident :: $sample:ident / $margin:ident) => {
        PropertyDef {
            id: $id,
            summary: $summary,
            negative_control: false,
            reports_acceptance: true,
            sample: $module::$sample,
            margin: $module::$margin,
        }
    };
}

static REGISTRY: &[PropertyDef] = &[
    prop!(
        "thm-2.7-logsup",
        "bottom eigenvalue products of a concave image of a power-transformed map dominate the transformed image",
        powermaps::sample_thm27_logsup / margin_thm27_logsup
    ),
    prop!(
        "thm-2.7-dominance",
        "entrywise eigenvalue dominance for monotone concave images under power-transformed maps",
        powermaps::sample_thm27_dominance / margin_thm27_dominance
    ),
    prop!(
        "thm-2.7-p0",
        "both dominance checks at the geometric (order-zero) transform with invertible input and unital map",
        powermaps::sample_thm27_p0 / margin_thm27_p0
    ),
    prop!(
        "cor-2.8",
        "concave image of the binomial matrix mean dominates the binomial mean of the images",
        powermaps::sample_cor28 / margin_cor28
    ),
    prop!(
        "cor-2.9",
        "Schur-multiplier specialization with sub-unit diagonal multiplier",
        powermaps::sample_cor29 / margin_cor29
    ),
    prop!(
        "cor-2.11",
        "determinant-root comparison for concave images of binomial means",
        powermaps::sample_cor211 / margin_cor211
    ),
    prop!(
        "prop-2.13",
        "reversed dominance for convex images at orders q >= 1, for maps and binomial means",
        powermaps::sample_prop213 / margin_prop213
    ),
    prop!(
        "thm-3.1-i",
        "top root products of geometrically convex means bounded below by mixed scalar means",
        spectral_order::sample_thm31_i / margin_thm31_i
    ),
    prop!(
        "thm-3.1-ii",
        "bottom root products of geometrically concave means bounded above by mixed scalar means",
        spectral_order::sample_thm31_ii / margin_thm31_ii
    ),
    prop!(
        "cor-3.2",
        "determinant-root comparison in the direction set by the geometric class",
        spectral_order::sample_cor32 / margin_cor32
    ),
    prop!(
        "prop-3.5",
        "two-sided aligned/anti-aligned chains for the weighted geometric mean",
        spectral_order::sample_prop35 / margin_prop35
    ),
    prop!(
        "cor-3.6",
        "weighted geometric mean log-majorized by the mean of sorted spectra",
        spectral_order::sample_cor36 / margin_cor36
    ),
    prop!(
        "prop-3.7",
        "measure-backed means are superadditive on bottom root products",
        spectral_order::sample_prop37 / margin_prop37
    ),
    prop!(
        "conj-1.7-search",
        "conjectured sorting relations for geometrically convex means (randomized check)",
        spectral_order::sample_conj17 / margin_conj17
    ),
    prop!(
        "thm-4.7",
        "derived anti-norms of concave images of geodesic means dominate the scalar mean of images",
        functional::sample_thm47 / margin_thm47
    ),
    prop!(
        "cor-4.8",
        "bottom-spectrum geometric-mean version of the derived anti-norm inequality",
        functional::sample_cor48 / margin_cor48
    ),
    prop!(
        control "rem-4.9-negative",
        "designed failure: regular anti-norms break the mean inequality on orthogonal supports",
        functional::sample_rem49 / margin_rem49
    ),
    prop!(
        "prop-4.12",
        "binomial-mean version for derived anti-norms including p-superadditivity",
        functional::sample_prop412 / margin_prop412
    ),
    prop!(
        "prop-4.13",
        "symmetric-norm reverse inequality for doubly convex images of geodesic means",
        functional::sample_prop413 / margin_prop413
    ),
    prop!(
        "prop-5.2",
        "measure-weighted mean sits between weighted harmonic and arithmetic means at the barycenter weight",
        barycenter::sample_prop52 / margin_prop52
    ),
    prop!(
        "prop-5.3",
        "Karcher barycenter log-majorized by the barycenter of sorted spectra",
        barycenter::sample_prop53 / margin_prop53
    ),
    prop!(
        "prop-5.4",
        "bottom-spectrum geometric means of the matrix mean dominate the scalar measure-mean",
        barycenter::sample_prop54 / margin_prop54
    ),
    prop!(
        "thm-5.5",
        "concave images win in derived anti-norms and doubly convex images lose in symmetric norms",
        barycenter::sample_thm55 / margin_thm55
    ),
    prop!(
        "bk-norm",
        "weighted product of symmetric norms bounds the norm of the Karcher barycenter",
        barycenter::sample_bk_norm / margin_bk_norm
    ),
    prop!(
        "bk-antinorm",
        "derived anti-norm of the Karcher barycenter bounds the weighted product of anti-norms",
        barycenter::sample_bk_antinorm / margin_bk_antinorm
    ),
    prop!(
        "cor-6.4",
        "doubly stochastic maps increase every symmetric anti-norm",
        traceforms::sample_cor64 / margin_cor64
    ),
    prop!(
        "thm-6.5",
        "Schur multiplication by a PSD matrix with diagonal >= 1 increases anti-norms",
        traceforms::sample_thm65 / margin_thm65
    ),
    prop!(
        "cor-6.6",
        "trace of increasing concave images grows under heavy-diagonal Schur products",
        traceforms::sample_cor66 / margin_cor66
    ),
    prop!(
        rejection "cor-6.7",
        "anti-norm comparisons for the transform integral and its endpoint limits (PSD-filtered)",
        traceforms::sample_cor67 / margin_cor67
    ),
    prop!(
        rejection "cor-agm",
        "reversed arithmetic-geometric inequality in anti-norms when AZ+ZA is PSD",
        traceforms::sample_cor_agm / margin_cor_agm
    ),
    prop!(
        control "sec6-det-counterexample",
        "designed failure: explicit 4x4 pair refuting the determinant product bound (1/16 vs 0)",
        traceforms::sample_det_counterexample / margin_det_counterexample
    ),
    prop!(
        "prop-revholder",
        "reverse Hoelder inequality for conjugate exponents with negative second exponent",
        traceforms::sample_revholder / margin_revholder
    ),
    prop!(
        "chain-6.14",
        "four-term norm chain for fractional-power compressions of a product",
        traceforms::sample_chain614 / margin_chain614
    ),
    prop!(
        "cor-6.9",
        "Ky Fan averages of the order-zero binomial mean dominate mixed root products",
        traceforms::sample_cor69 / margin_cor69
    ),
    prop!(
        control "rem-3.3-false",
        "designed failure: the top eigenvalue is not superadditive",
        spectral_order::sample_rem33 / margin_rem33
    ),
];

/// All registered properties in their canonical order.
pub fn registry() -> &'static [PropertyDef] {
    REGISTRY
}

pub fn find_property(id: &str) -> Option<&'static PropertyDef> {
    REGISTRY.iter().find(|p| p.id == id)
}

/// Canonical-order id list, used to expand the "all" campaign selector.
pub fn all_ids() -> Vec<String> {
    REGISTRY.iter().map(|p| p.id.to_string()).collect()
}

//! End-to-end analysis: validate, kneading data, determinant, Markov
//! matrices, identity checks and invariants.

use crate::error::{AnalysisError, MarkovError};
use crate::kneading::{kneading_determinant, kneading_matrix, r_polynomial, KneadingMatrix};
use crate::map_model::{validate_map, HoleMap, ValidatedMap};
use crate::markov::{build_bundle, verify_identities, MatrixBundle, VerificationReport};
use crate::poly::{CyclotomicFactor, WeightRationalFn};
use crate::spectral::{compute_invariants, InvariantReport, SpectralOptions};
use crate::symbolic::{kneading_data, KneadingData, OrbitOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzeOptions {
    pub orbit: OrbitOptions,
    pub spectral: SpectralOptions,
    /// Accept non-Markov maps by cutting itineraries at this depth; the
    /// invariants then come from the truncated determinant alone.
    pub truncate_depth: Option<usize>,
    /// Require fixed domain endpoints.
    pub strict: bool,
    /// Skip the exact identity checks (the characteristic polynomials).
    pub skip_verification: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            orbit: OrbitOptions::default(),
            spectral: SpectralOptions::default(),
            truncate_depth: None,
            strict: true,
            skip_verification: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub map: ValidatedMap,
    pub data: KneadingData,
    pub kneading: KneadingMatrix,
    pub determinant: WeightRationalFn,
    pub r: Vec<CyclotomicFactor>,
    /// Absent in truncated mode.
    pub bundle: Option<MatrixBundle>,
    pub verification: Option<VerificationReport>,
    pub invariants: InvariantReport,
}

impl Analysis {
    pub fn verified(&self) -> bool {
        self.verification.as_ref().is_none_or(|v| v.all_passed())
    }
}

pub fn analyze(map: HoleMap, opts: &AnalyzeOptions) -> Result<Analysis, AnalysisError> {
    let map = validate_map(map, opts.strict)?;
    analyze_validated(map, opts)
}

pub fn analyze_validated(map: ValidatedMap, opts: &AnalyzeOptions) -> Result<Analysis, AnalysisError> {
    let first = kneading_data(&map, &opts.orbit);
    let needs_cut = match &first {
        Ok(d) => d.is_truncated(),
        Err(_) => true,
    };
    let data = match (needs_cut, opts.truncate_depth) {
        (false, _) => first?,
        (true, Some(depth)) => {
            let orbit = OrbitOptions {
                cap: depth,
                ..opts.orbit
            };
            kneading_data(&map, &orbit)?
        }
        (true, None) => {
            let data = first?;
            let e = data.entries.iter().chain(&data.endpoints).find(|e| e.orbit.class.is_truncated());
            let label = e.map_or_else(String::new, |e| e.point.label());
            return Err(MarkovError::NotMarkov(label).into());
        }
    };
    let kneading = kneading_matrix(&map, &data)?;
    let determinant = kneading_determinant(&kneading);
    let r = r_polynomial(&map, &data);
    let (bundle, verification) = if data.is_truncated() {
        (None, None)
    } else {
        let bundle = build_bundle(&map, &data)?;
        let verification = (!opts.skip_verification).then(|| verify_identities(&bundle, &determinant, &r));
        (Some(bundle), verification)
    };
    let invariants = compute_invariants(
        &map,
        &determinant,
        bundle.as_ref().map(|b| &b.q),
        kneading.truncation,
        &opts.spectral,
    )?;
    Ok(Analysis {
        map,
        data,
        kneading,
        determinant,
        r,
        bundle,
        verification,
        invariants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_model::tests::paper_example;

    #[test]
    fn example_end_to_end() {
        let a = analyze(paper_example(), &AnalyzeOptions::default()).unwrap();
        assert!(a.verified());
        assert_eq!(a.verification.as_ref().unwrap().checks.len(), 5);
        assert!((a.invariants.escape_rate - 0.087_776_856_2).abs() < 1e-9);
        assert_eq!(a.invariants.approximate, None);
    }

    #[test]
    fn truncated_orbits_need_a_depth() {
        let opts = AnalyzeOptions {
            orbit: OrbitOptions {
                cap: 2,
                ..OrbitOptions::default()
            },
            ..AnalyzeOptions::default()
        };
        let err = analyze(paper_example(), &opts).unwrap_err();
        assert!(matches!(err, AnalysisError::Markov(MarkovError::NotMarkov(_))), "{err:?}");
        let a = analyze(
            paper_example(),
            &AnalyzeOptions {
                truncate_depth: Some(3),
                ..opts.clone()
            },
        )
        .unwrap();
        assert_eq!(a.invariants.approximate, Some(3));
        assert!(a.bundle.is_none() && a.verification.is_none());
        assert!((a.invariants.hausdorff_dimension - 0.91994).abs() < 0.1, "{:?}", a.invariants);
        // a depth past every recurrence gives the exact analysis back
        let a = analyze(
            paper_example(),
            &AnalyzeOptions {
                truncate_depth: Some(40),
                ..opts
            },
        )
        .unwrap();
        assert_eq!(a.invariants.approximate, None);
        assert!(a.verified());
    }

    #[test]
    fn countable_repeller_has_no_determinant_root() {
        use crate::map_model::{int, rat, Lap};
        // only the two fixed endpoints and their preimages survive
        let h = HoleMap {
            name: None,
            domain: (int(0), int(1)),
            laps: vec![
                Lap::new(int(0), rat(3, 8), int(2), int(0)),
                Lap::new(rat(7, 8), int(1), int(7), int(-6)),
            ],
            hole: (rat(3, 8), rat(7, 8)),
        };
        assert!(!crate::corpus::is_transitive(&validate_map(h.clone(), true).unwrap()));
        let a = analyze(h, &AnalyzeOptions::default()).unwrap();
        assert!(a.verified());
        assert!(a.determinant.numerator.is_one());
        let inv = &a.invariants;
        assert_eq!(inv.hausdorff_dimension, 0.0);
        assert_eq!(inv.topological_entropy, 0.0);
        assert!((inv.escape_rate - 2f64.ln()).abs() < 1e-12);
        assert!(inv.determinant_route.is_none() && inv.route_difference.is_none());
    }

    #[test]
    fn transient_fixed_point_splits_the_escape_routes() {
        use crate::map_model::{int, rat, Lap};
        // the fixed point 0 sits in a transient Markov interval; at beta = 1
        // its weight 1/2 beats the Cantor part, root sqrt(13) - 1 of 1 - t/6 - t^2/12
        let h = HoleMap {
            name: None,
            domain: (int(0), int(1)),
            laps: vec![
                Lap::new(int(0), rat(1, 2), int(2), int(0)),
                Lap::new(rat(9, 10), int(1), int(6), int(-5)),
            ],
            hole: (rat(1, 2), rat(9, 10)),
        };
        assert!(!crate::corpus::is_transitive(&validate_map(h.clone(), true).unwrap()));
        let a = analyze(h, &AnalyzeOptions::default()).unwrap();
        assert!(a.verified());
        let p = a.invariants.pressure_route.unwrap();
        let d = a.invariants.determinant_route.unwrap();
        assert!((p.escape_rate - 2f64.ln()).abs() < 1e-12);
        assert!((d.escape_rate - (13f64.sqrt() - 1.0).ln()).abs() < 1e-10);
        assert!((p.hausdorff_dimension - d.hausdorff_dimension).abs() < 1e-8);
        assert!((p.topological_entropy - d.topological_entropy).abs() < 1e-8);
    }
}

use std::time::Instant;

use kneading::corpus::corpus;
use kneading::pipeline::{analyze_validated, AnalyzeOptions};

#[test]
fn corpus_identities_and_routes() {
    let start = Instant::now();
    let maps = corpus(2024, 24);
    for m in maps {
        let name = m.name().unwrap().to_string();
        let lap_count = m.n_laps();
        let a = analyze_validated(m, &AnalyzeOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let v = a.verification.as_ref().unwrap();
        for c in &v.checks {
            assert!(c.passed, "{name}: {} failed: {:?}", c.name, c.detail);
        }
        let inv = &a.invariants;
        assert!(inv.route_difference.unwrap() < 1e-8, "{name}: {inv:?}");
        if let Some(s) = inv.moran_dimension {
            assert!((s - inv.hausdorff_dimension).abs() < 1e-8, "{name}: {inv:?}");
        }
        println!(
            "{name}: laps {lap_count} q {} dim {:.6} gamma {:.6} h {:.6}",
            a.bundle.as_ref().unwrap().chain.q(),
            inv.hausdorff_dimension,
            inv.escape_rate,
            inv.topological_entropy
        );
    }
    println!("elapsed {:?}", start.elapsed());
}

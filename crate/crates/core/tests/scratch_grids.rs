use phan_core::harness::{registry, run_suite, SuiteDescriptor};

#[test]
fn full_grids() {
    for def in registry() {
        let started = std::time::Instant::now();
        let desc = SuiteDescriptor::new(def.id).unwrap();
        let report = run_suite(&desc).unwrap();
        let s = &report.summary;
        println!(
            "{:>18}  cases={:>5}  verified={:>5} refuted={} skipped={} no_witness={}  {:?}",
            def.id,
            report.cases.len(),
            s.verified,
            s.refuted,
            s.skipped_budget,
            s.no_witness,
            started.elapsed()
        );
        for c in &report.cases {
            if c.verdict == "refuted-with-counterexample" {
                println!("  REFUTED case {}: {:?}", c.case, c.counterexample);
            }
        }
    }
}

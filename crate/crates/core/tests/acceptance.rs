//! Acceptance harness: every criterion runs at its pinned tolerance and
//! prints one pass/fail line. Criteria map onto the named check suites;
//! the final assertions fail the test if any line failed.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use modscale::checks::{determinism_report, run_suite, CheckConfig, SuiteReport, SUITES};

struct Gate {
    reports: Vec<SuiteReport>,
}

impl Gate {
    fn line(&self, suite: &str, name: &str) -> (bool, String) {
        let report = self
            .reports
            .iter()
            .find(|r| r.suite == suite)
            .unwrap_or_else(|| panic!("suite {suite} missing"));
        let line = report
            .lines
            .iter()
            .find(|l| l.name == name)
            .unwrap_or_else(|| panic!("line {name} missing in suite {suite}"));
        (line.passed, line.detail.clone())
    }

    fn criterion(&self, id: &str, label: &str, parts: &[(&str, &str)]) -> bool {
        let mut ok = true;
        let mut details = Vec::new();
        for (suite, name) in parts {
            let (passed, detail) = self.line(suite, name);
            ok &= passed;
            details.push(format!("{name} {detail}"));
        }
        println!(
            "criterion {:>2} [{}] {}  ({})",
            id,
            if ok { "PASS" } else { "FAIL" },
            label,
            details.join("; ")
        );
        ok
    }
}

#[test]
fn acceptance_criteria() {
    let cfg = CheckConfig::default();
    let mut reports: Vec<SuiteReport> = SUITES
        .iter()
        .map(|name| run_suite(name, &cfg).unwrap_or_else(|e| panic!("suite {name}: {e}")))
        .collect();
    reports.push(determinism_report(&cfg).unwrap());
    let gate = Gate { reports };

    let mut all = true;
    all &= gate.criterion(
        "1",
        "partition of unity exact to 1e-12 (d=1, d=2), generator complement 1e-15",
        &[
            ("pou", "partition-sum-d1"),
            ("pou", "partition-sum-d2"),
            ("pou", "generator-complement"),
            ("pou", "corrupted-generator-detected"),
        ],
    );
    all &= gate.criterion(
        "2",
        "exact dyadic rescaling, multiplicative weight, gaussian + sinc-dual",
        &[
            ("scaling", "multiplicative-rescaling-gaussian"),
            ("scaling", "multiplicative-rescaling-sinc-dual"),
            ("scaling", "multiplicative-rescaling-d2"),
        ],
    );
    all &= gate.criterion(
        "3",
        "weight-translating rescaling law, non-multiplicative weight",
        &[("scaling", "weight-translation-rescaling")],
    );
    all &= gate.criterion(
        "4",
        "per-scale dilation identity at (4,4) and (1,2)",
        &[
            ("scaling", "dilation-identity-p4-q4"),
            ("scaling", "dilation-identity-p1-q2"),
        ],
    );
    all &= gate.criterion(
        "5",
        "propagator chain: commutation 1e-8, norm identity 1e-10, mass 1e-12, group law 1e-12",
        &[
            ("z-chain", "cell-commutation-t0.5"),
            ("z-chain", "cell-commutation-t0"),
            ("z-chain", "norm-identity"),
            ("z-chain", "mass-conservation"),
            ("z-chain", "group-law"),
            ("z-chain", "chain-consistency"),
        ],
    );
    all &= gate.criterion(
        "6",
        "envelope sweeps: spread <= 8, slopes within 15% of d/2 and -1/4",
        &[
            ("envelopes", "fixed-space-spread-p1"),
            ("envelopes", "fixed-space-slope-p1"),
            ("envelopes", "fixed-space-t0"),
            ("envelopes", "fixed-space-p2-flat"),
            ("envelopes", "dual-exponent-spread-p4"),
            ("envelopes", "dual-exponent-slope-p4"),
            ("envelopes", "aggregated-weighted-bound"),
        ],
    );
    all &= gate.criterion(
        "7",
        "Hausdorff-Young cells (<= at p=4, = at p=2) and weighted-amalgam dominance",
        &[
            ("embedding", "hausdorff-young-cells-p4"),
            ("embedding", "hausdorff-young-equality-p2"),
            ("embedding", "amalgam-dominance-p4-q4"),
            ("embedding", "amalgam-dominance-p3-q4"),
        ],
    );
    all &= gate.criterion(
        "8",
        "L2-embedding ratio stability and log-singular strictness",
        &[
            ("embedding", "l2-embedding-ratio-stability"),
            ("embedding", "octave-mass-harmonic-fit"),
            ("embedding", "strictness-increments-summable"),
        ],
    );
    all &= gate.criterion(
        "9",
        "admissibility threshold sharp: flat at threshold, Cauchy inside",
        &[
            ("sharpness", "threshold-flat-low"),
            ("sharpness", "threshold-flat-high"),
            ("sharpness", "cauchy-negative-end"),
            ("sharpness", "cauchy-positive-end"),
        ],
    );
    all &= gate.criterion(
        "10",
        "windowed-transform dilation identity and recorded equivalence bands",
        &[
            ("stft-a2", "window-dilation-identity"),
            ("stft-a2", "equivalence-band-low"),
            ("stft-a2", "equivalence-band-high"),
            ("stft-a2", "equivalence-band-stability"),
            ("stft-a2", "weight-exchange-low"),
            ("stft-a2", "weight-exchange-high"),
        ],
    );
    all &= gate.criterion(
        "11",
        "weighted-amalgam correspondence exact, rescaling exponent -d/2",
        &[
            ("embedding", "fx-weighted-amalgam-agreement"),
            ("embedding", "fx-rescaling-exponent"),
        ],
    );
    all &= gate.criterion(
        "12",
        "pairing bounded by the two norms on random pairs",
        &[
            ("duality", "dual-weight-admissible"),
            ("duality", "pairing-two-norm-bound"),
            ("duality", "conjugate-self-pairing-positive"),
        ],
    );
    all &= gate.criterion(
        "13",
        "norm axioms, deep-scale decay slope, large-scale plateau",
        &[
            ("duality", "triangle-inequality"),
            ("duality", "absolute-homogeneity"),
            ("sharpness", "decay-slope"),
            ("sharpness", "plateau-dominates-lp"),
        ],
    );
    all &= gate.criterion(
        "14",
        "suites byte-identical across 1, 2, 8 workers",
        &SUITES
            .iter()
            .map(|s| ("determinism", format!("byte-identical-{s}")))
            .collect::<Vec<_>>()
            .iter()
            .map(|(a, b)| (*a, b.as_str()))
            .collect::<Vec<_>>(),
    );

    for r in &gate.reports {
        if !r.passed() {
            println!("{}", r.render());
        }
    }
    assert!(all, "at least one acceptance criterion failed");
}

//! Recounts every sweep row from the ground up. Recommendation lists are
//! rebuilt with the public scorers; relevance is re-judged with hand-rolled
//! tie and correlation arithmetic over the held-out contact records. Where
//! a signal sits within float noise of the threshold the recount brackets
//! the library's verdict instead of forcing one.

use std::collections::BTreeMap;

use sparp_core::baselines::{c1_score, c2_score};
use sparp_core::evaluation::{run_experiment, Method, MetricsReport, RelevanceCriteria, SplitSpec};
use sparp_core::model::{Dataset, Epoch, Pair, ParticipantId};
use sparp_core::personality::personality_matrix;
use sparp_core::synth::{generate_synthetic, SynthesisParams};
use sparp_core::tie::tie_matrix;
use sparp_core::{merge_scores, recommend, split_pairs, Recommendation};

/// Signals this close to tau are treated as ambiguous and bracketed.
const MARGIN: f64 = 1.0e-9;

struct RelevanceOracle {
    contacts: BTreeMap<(ParticipantId, ParticipantId, Epoch), (f64, u32)>,
    profiles: BTreeMap<ParticipantId, [f64; 5]>,
    total_time: f64,
    tau: f64,
}

enum Verdict {
    Relevant,
    Irrelevant,
    TooCloseToCall,
}

impl RelevanceOracle {
    fn new(d: &Dataset, test_pairs: &std::collections::BTreeSet<Pair>, tau: f64) -> Self {
        let mut contacts = BTreeMap::new();
        for c in &d.contacts {
            let pair = c.pair().unwrap();
            if test_pairs.contains(&pair) {
                contacts.insert(
                    (pair.first().clone(), pair.second().clone(), c.epoch),
                    (c.duration_minutes, c.frequency),
                );
            }
        }
        let profiles = d
            .profiles
            .iter()
            .map(|(id, p)| (id.clone(), p.as_array().map(f64::from)))
            .collect();
        Self {
            contacts,
            profiles,
            total_time: d.config.total_time_minutes,
            tau,
        }
    }

    fn blended_tie(&self, pair: &Pair, beta: f64) -> f64 {
        let raw = |epoch: Epoch| -> f64 {
            self.contacts
                .get(&(pair.first().clone(), pair.second().clone(), epoch))
                .map(|&(duration, frequency)| f64::from(frequency) * duration / self.total_time)
                .unwrap_or(0.0)
        };
        beta * raw(Epoch::Past) + (1.0 - beta) * raw(Epoch::Present)
    }

    fn similarity(&self, pair: &Pair) -> f64 {
        let xs = self.profiles[pair.first()];
        let ys = self.profiles[pair.second()];
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let var_x: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let var_y: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
        if var_x == 0.0 || var_y == 0.0 {
            0.0
        } else {
            cov / (var_x.sqrt() * var_y.sqrt())
        }
    }

    /// Either-mode judgment: the stronger signal decides.
    fn judge(&self, pair: &Pair, beta: f64) -> Verdict {
        let signal = self.blended_tie(pair, beta).max(self.similarity(pair));
        if signal >= self.tau + MARGIN {
            Verdict::Relevant
        } else if signal < self.tau - MARGIN {
            Verdict::Irrelevant
        } else {
            Verdict::TooCloseToCall
        }
    }
}

fn bucket_of(score: f64) -> i64 {
    (score * 10.0).round() as i64
}

fn rebuild_recommendations(
    full: &Dataset,
    train: &Dataset,
    method: Method,
    beta: f64,
) -> Vec<Recommendation> {
    let config = &full.config;
    let matrix = match method {
        Method::Sparp => {
            let ties = tie_matrix(train, beta).unwrap();
            let personalities = personality_matrix(full).unwrap();
            merge_scores(&ties, &personalities, config.normalization_mode).unwrap()
        }
        Method::C1 => c1_score(train).unwrap(),
        Method::C2 => c2_score(train).unwrap(),
    };
    recommend(&matrix, config.gamma, config.top_n)
}

fn assert_report_matches_recount(
    d: &Dataset,
    report: &MetricsReport,
    betas: &[f64],
    methods: &[Method],
) {
    let split = SplitSpec::default();
    let (train_view, test_view) = split_pairs(d, &split).unwrap();
    let train = train_view.restricted_dataset();
    let oracle = RelevanceOracle::new(d, test_view.pairs(), report.criteria.tau);

    let mut expected_row_count = 0;
    let mut expected_note_count = 0;
    for &method in methods {
        for &beta in betas {
            let recs = rebuild_recommendations(d, &train, method, beta);
            for tenths in 8..=10i64 {
                let bucket = tenths as f64 / 10.0;
                let in_bucket: Vec<&Recommendation> = recs
                    .iter()
                    .filter(|r| bucket_of(r.merged_score) == tenths)
                    .collect();

                let row = report
                    .rows
                    .iter()
                    .find(|r| r.method == method && r.beta == beta && r.bucket == bucket);
                if in_bucket.is_empty() {
                    expected_note_count += 1;
                    assert!(
                        row.is_none(),
                        "{method} beta={beta} bucket={bucket}: unexpected row"
                    );
                    let note =
                        format!("{method} beta={beta} bucket={bucket:.1}: no recommendations");
                    assert!(
                        report.notes.contains(&note),
                        "missing note `{note}` in {:?}",
                        report.notes
                    );
                    continue;
                }

                expected_row_count += 1;
                let row = row.unwrap_or_else(|| {
                    panic!("{method} beta={beta} bucket={bucket}: row missing from report")
                });
                assert_eq!(
                    row.recommendation_count,
                    in_bucket.len(),
                    "{method} beta={beta} bucket={bucket}: recommendation count"
                );

                let mut certain = 0usize;
                let mut possible = 0usize;
                for rec in &in_bucket {
                    let pair =
                        Pair::new(rec.for_participant.clone(), rec.suggested.clone()).unwrap();
                    match oracle.judge(&pair, beta) {
                        Verdict::Relevant => {
                            certain += 1;
                            possible += 1;
                        }
                        Verdict::TooCloseToCall => possible += 1,
                        Verdict::Irrelevant => {}
                    }
                }
                assert!(
                    (certain..=possible).contains(&row.successful_count),
                    "{method} beta={beta} bucket={bucket}: {} successes reported, recount allows {certain}..={possible}",
                    row.successful_count
                );

                assert_eq!(
                    row.accuracy,
                    row.successful_count as f64 / row.recommendation_count as f64,
                    "{method} beta={beta} bucket={bucket}: accuracy identity"
                );
                assert_eq!(row.mae, 1.0 - row.accuracy);
                assert_eq!(row.nmae, row.mae / (report.rating_max - report.rating_min));
            }
        }
    }
    assert_eq!(
        report.rows.len(),
        expected_row_count,
        "extra rows in report"
    );
    assert_eq!(
        report.notes.len(),
        expected_note_count,
        "extra notes in report"
    );
}

#[test]
fn sweep_rows_survive_independent_recount() {
    let d = generate_synthetic(&SynthesisParams::default()).unwrap();
    let betas = [0.1, 0.4];
    let methods = Method::ALL;
    let report = run_experiment(
        &d,
        &betas,
        &methods,
        &RelevanceCriteria::default(),
        &SplitSpec::default(),
    )
    .unwrap();
    assert!(!report.rows.is_empty(), "sweep produced no rows to check");
    assert_report_matches_recount(&d, &report, &betas, &methods);
}

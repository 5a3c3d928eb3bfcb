use lmrank::lbdm::{self, LbdmConfig};
use lmrank::lmd::{self, SmoothConfig};
use lmrank::{Corpus, Query, ScoreMode, TopicParams};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (Corpus, TopicParams, f64, f64, Vec<(usize, f64)>)> {
    (
        prop::collection::vec(prop::collection::vec(0u8..30, 0..25), 1..=20),
        1usize..=5,
        any::<u64>(),
        0.01f64..1e4,
        0.0f64..=1.0,
        prop::collection::vec((any::<prop::sample::Index>(), 1u8..4), 1..5),
    )
        .prop_filter_map("corpus needs a term", |(docs, k, seed, mu, lambda, q)| {
            let corpus = Corpus::build(
                docs.iter()
                    .map(|d| d.iter().map(|t| format!("w{t}")).collect::<Vec<_>>()),
            )
            .ok()?;
            let n = corpus.num_terms();
            if n == 0 {
                return None;
            }
            let params = TopicParams::synthesize(seed, corpus.num_docs(), n, k).ok()?;
            let query = q.iter().map(|(i, f)| (i.index(n), *f as f64)).collect();
            Some((corpus, params, mu, lambda, query))
        })
}

fn config(mu: f64, lambda: f64) -> LbdmConfig {
    LbdmConfig::new(lambda, SmoothConfig::new(mu, ScoreMode::Linear).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn mixture_is_linear_in_components((c, t, mu, lambda, q) in instance()) {
        let q = Query::from_frequencies("q", &q);
        let model = lbdm::build(&c, &t, &config(mu, lambda)).unwrap();
        let mixed = model.score(&q).unwrap().scores;
        let dirichlet = lmd::score(&lmd::build_matrix(&c, mu).unwrap(), &q, ScoreMode::Linear).unwrap().scores;
        let topical = model.topic_scores(&q).unwrap();
        for d in 0..c.num_docs() {
            let want = lambda * dirichlet[d] + (1.0 - lambda) * topical[d];
            prop_assert!((mixed[d] - want).abs() <= 1e-12, "{} vs {}", mixed[d], want);
        }
    }

    #[test]
    fn scores_continuous_in_lambda((c, t, mu, lambda, q) in instance()) {
        let eps = 1e-8;
        let lambda = lambda.min(1.0 - eps);
        let q = Query::from_frequencies("q", &q);
        let a = lbdm::build(&c, &t, &config(mu, lambda)).unwrap().score(&q).unwrap().scores;
        let b = lbdm::build(&c, &t, &config(mu, lambda + eps)).unwrap().score(&q).unwrap().scores;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn mixture_rows_are_stochastic((c, t, mu, lambda, _q) in instance()) {
        let dense = lbdm::build(&c, &t, &config(mu, lambda)).unwrap().to_dense();
        for s in dense.row_sums() {
            prop_assert!((s - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn lmd_cells_match_oracle((c, _t, mu, _lambda, _q) in instance()) {
        let p = lmd::build_matrix(&c, mu).unwrap();
        for d in 0..c.num_docs() {
            let mut row = 0.0;
            for w in 0..c.num_terms() {
                let want = lmd::prob_oracle(&c, d, w, mu).unwrap();
                let got = p.get(d, w);
                prop_assert!((got - want).abs() <= 1e-12 * want);
                row += got;
            }
            prop_assert!((row - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn log_mode_equals_log_of_mixture_cells() {
    let c = Corpus::build([vec!["a", "b", "b"], vec!["c"], vec![]]).unwrap();
    let t = TopicParams::synthesize(5, 3, 3, 2).unwrap();
    let model = lbdm::build(
        &c,
        &t,
        &LbdmConfig::new(0.4, SmoothConfig::new(3.0, ScoreMode::Log).unwrap()).unwrap(),
    )
    .unwrap();
    let q = Query::build("q", ["a", "c", "c"], c.vocab());
    let s = model.score(&q).unwrap().scores;
    for (d, &got) in s.iter().enumerate() {
        let want = lbdm::prob_oracle(&c, &t, d, 0, 3.0, 0.4).unwrap().ln()
            + 2.0 * lbdm::prob_oracle(&c, &t, d, 2, 3.0, 0.4).unwrap().ln();
        assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
    }
}

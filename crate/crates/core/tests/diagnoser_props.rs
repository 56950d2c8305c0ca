mod common;

use common::{random_instance, rng};
use phidiag::checker::analyze;
use phidiag::diagnoser::Diagnoser;
use phidiag::error::DiagnoserError;
use phidiag::model::{project, Axis};
use phidiag::oracle::{enumerate_capped, normal_observations, sample_faulty_lasso, NaiveProduct};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const CAP: usize = 3000;

// Beliefs against brute-force string enumeration. Enumeration is exponential
// in the silent budget, so it is capped and capped results are skipped; the
// run must still check a reasonable number of prefixes.
#[test]
fn alarm_iff_every_compatible_string_is_faulty() {
    let mut checked = 0;
    for seed in 0..80 {
        let (m, c) = random_instance(seed);
        let a = analyze(&m, &c);
        let d = Diagnoser::new(&m, &a.constrained);
        let naive = NaiveProduct::with_nba(&m, &c.labeling, &a.nba);
        let mut r = rng(seed);
        let mut streams: Vec<Vec<usize>> = Vec::new();
        // observations of random runs of T, plus arbitrary symbol sequences
        for _ in 0..4 {
            let Some(&(mut x)) = naive.initial.choose(&mut r) else { break };
            let mut s = Vec::new();
            for _ in 0..12 {
                let Some(&(e, y)) = naive.edges[x].choose(&mut r) else { break };
                s.push(e);
                x = y;
            }
            let mut o = project(&s, Axis::Output);
            o.truncate(6);
            streams.push(o);
        }
        if !m.outputs().is_empty() {
            for _ in 0..2 {
                let len = r.gen_range(0..=6);
                streams.push((0..len).map(|_| r.gen_range(0..m.outputs().len())).collect());
            }
        }
        for obs in streams {
            let syms: Vec<&str> = obs.iter().map(|&o| m.outputs()[o].as_str()).collect();
            let (beliefs, failed) = match d.replay(&syms) {
                Ok(b) => (b, None),
                Err(DiagnoserError::InfeasibleObservation { step }) => (d.replay(&syms[..step - 1]).unwrap(), Some(step)),
                Err(e) => panic!("{e}"),
            };
            for (k, b) in beliefs.iter().enumerate() {
                let en = enumerate_capped(&naive, &obs[..k], CAP);
                if en.partial {
                    break;
                }
                assert_eq!(d.is_alarm(b), en.all_faulty(&m), "seed {seed} after {:?}", &syms[..k]);
                checked += 1;
            }
            if let Some(step) = failed {
                let en = enumerate_capped(&naive, &obs[..step], CAP);
                assert!(en.partial || en.strings.is_empty(), "seed {seed}: {:?} has runs", &syms[..step]);
            }
        }
    }
    assert!(checked >= 300, "only {checked} prefixes compared");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn diagnosable_means_no_false_alarm_and_detection(seed in any::<u64>()) {
        let (m, c) = random_instance(seed);
        let a = analyze(&m, &c);
        if !a.verdict.diagnosable {
            return Ok(());
        }
        let d = Diagnoser::new(&m, &a.constrained);
        let naive = NaiveProduct::with_nba(&m, &c.labeling, &a.nba);
        let name = |o: &usize| m.outputs()[*o].clone();
        for obs in normal_observations(&naive, 5) {
            let syms: Vec<String> = obs.iter().map(name).collect();
            let beliefs = d.replay(&syms).unwrap();
            prop_assert!(beliefs.iter().all(|b| !d.is_alarm(b)), "false alarm on {:?}", syms);
        }
        let mut r = rng(seed);
        for _ in 0..3 {
            let Some(l) = sample_faulty_lasso(&naive, &mut r, 4) else { break };
            let s = l.unroll(l.prefix.len() + 2 * a.constrained.num_states());
            let syms: Vec<String> = project(&s, Axis::Output).iter().map(name).collect();
            let beliefs = d.replay(&syms).unwrap();
            prop_assert!(d.is_alarm(beliefs.last().unwrap()), "missed fault on {:?}", l);
        }
    }
}

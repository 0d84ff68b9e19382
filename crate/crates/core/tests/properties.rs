use std::collections::BTreeSet;

use bmdp_core::bracket::Sampler;
use bmdp_core::format::{parse_model, write_bmdp, write_labelled, Model};
use bmdp_core::graph::{bmdp_mec_decomposition, mec_decomposition, EndComponent};
use bmdp_core::model::{induce_mc, instantiate, is_consistent, NaturePolicy, PositionalPolicy};
use bmdp_core::omega::{build_game, mc_rabin};
use bmdp_core::polytope::bfs_vertices;
use bmdp_core::product::{build_product, dra_accepts_lasso, Alphabet, Dra, LabelledBmdp};
use bmdp_core::random::{random_acceptance, random_bmdp, random_point_bmdp, RandomShape};
use bmdp_core::reach::{bmdp_reach, mdp_reach, ReachQuery};
use bmdp_core::{ActionId, Bmdp, Mdp, Sense, StateId};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small() -> RandomShape {
    RandomShape {
        max_states: 5,
        ..RandomShape::default()
    }
}

#[test]
fn sampled_natures_give_consistent_models() {
    let mut r = rng(1);
    for _ in 0..200 {
        let m = random_bmdp(&mut r, small());
        let mut sampler = Sampler::new(&m, r.gen()).unwrap();
        let sample = sampler.sample(&m).unwrap();
        let nature = NaturePolicy::new(sample.transitions().to_vec());
        let inst = instantiate(&m, &nature).unwrap();
        assert!(is_consistent(&inst, &m).unwrap());

        let sk = m.skeleton();
        let policy = PositionalPolicy::from_choices(sk.states().map(|s| Some(sk.available(s)[0])).collect());
        let mc = induce_mc(&inst, &policy).unwrap();
        for d in mc.transitions() {
            let total: f64 = d.entries().iter().map(|e| e.1).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

/// Conditions of an end component, checked directly on the MDP.
fn is_end_component(mdp: &Mdp, ec: &EndComponent) -> bool {
    let sk = mdp.skeleton();
    let closed = ec.actions.iter().all(|&a| {
        ec.states.contains(&sk.owner(a)) && mdp.trans(a).support().all(|t| ec.states.contains(&t))
    });
    let every_state_acts = ec.states.iter().all(|&s| sk.available(s).iter().any(|a| ec.actions.contains(a)));
    // Strong connectivity: everything reaches everything using EC actions.
    let reach_all = ec.states.iter().all(|&start| {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            for a in sk.available(s).iter().filter(|a| ec.actions.contains(a)) {
                for t in mdp.trans(*a).support() {
                    if seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
        }
        seen == ec.states
    });
    closed && every_state_acts && reach_all
}

#[test]
fn mecs_are_disjoint_end_components() {
    let mut r = rng(2);
    for _ in 0..300 {
        let mdp = random_point_bmdp(&mut r, small()).point_mdp().unwrap();
        let mecs = mec_decomposition(&mdp);
        let mut seen = BTreeSet::new();
        for ec in &mecs {
            assert!(is_end_component(&mdp, ec), "{ec:?}");
            for s in &ec.states {
                assert!(seen.insert(*s));
            }
        }
        // Maximality: no single extra state can be added to a MEC.
        for ec in &mecs {
            for s in mdp.skeleton().states().filter(|s| !ec.states.contains(s)) {
                let mut states = ec.states.clone();
                states.insert(s);
                let actions: BTreeSet<ActionId> = states
                    .iter()
                    .flat_map(|&t| mdp.skeleton().available(t).iter().copied())
                    .filter(|&a| mdp.trans(a).support().all(|u| states.contains(&u)))
                    .collect();
                assert!(!is_end_component(&mdp, &EndComponent { states, actions }));
            }
        }
    }
}

/// MECs of the explicit game projected back to the model.
fn projected_game_mecs(m: &Bmdp) -> Vec<EndComponent> {
    let n = m.num_states();
    let game = build_game(m).unwrap();
    let mut out: Vec<EndComponent> = mec_decomposition(game.mdp())
        .into_iter()
        .filter_map(|ec| {
            let states: BTreeSet<StateId> = ec.states.iter().copied().filter(|s| s.0 < n).collect();
            let actions: BTreeSet<ActionId> =
                ec.states.iter().filter(|s| s.0 >= n).map(|s| ActionId(s.0 - n)).collect();
            (!states.is_empty()).then_some(EndComponent { states, actions })
        })
        .collect();
    out.sort_by(|a, b| a.states.cmp(&b.states));
    out
}

#[test]
fn interval_mecs_match_game_mecs() {
    let mut r = rng(3);
    for i in 0..300 {
        let m = random_bmdp(&mut r, small());
        let mut mine = bmdp_mec_decomposition(&m);
        mine.sort_by(|a, b| a.states.cmp(&b.states));
        assert_eq!(mine, projected_game_mecs(&m), "model {i}");
    }
}

#[test]
fn point_interval_mecs_match_mdp_mecs() {
    let mut r = rng(4);
    for _ in 0..100 {
        let m = random_point_bmdp(&mut r, small());
        let mut a = bmdp_mec_decomposition(&m);
        let mut b = mec_decomposition(&m.point_mdp().unwrap());
        a.sort_by(|x, y| x.states.cmp(&y.states));
        b.sort_by(|x, y| x.states.cmp(&y.states));
        assert_eq!(a, b);
    }
}

#[test]
fn robust_reachability_sandwiches_instantiations() {
    let mut r = rng(5);
    for i in 0..60 {
        let m = random_bmdp(&mut r, small());
        let n = m.num_states();
        let target: Vec<StateId> = (0..n).filter(|_| r.gen_bool(0.4)).map(StateId).collect();
        if target.is_empty() {
            continue;
        }
        let (lo, _, lo_nature) = bmdp_reach(&m, &ReachQuery::new(target.clone(), Sense::Max, Sense::Min)).unwrap();
        let (hi, _, hi_nature) = bmdp_reach(&m, &ReachQuery::new(target.clone(), Sense::Max, Sense::Max)).unwrap();
        for nature in [&lo_nature, &hi_nature] {
            for (a, row) in m.rows().iter().enumerate() {
                let d = nature.get(ActionId(a));
                let vs = bfs_vertices(row).unwrap();
                assert!(vs.iter().any(|v| {
                    v.entries().len() == d.entries().len()
                        && v.entries().iter().zip(d.entries()).all(|(x, y)| x.0 == y.0 && (x.1 - y.1).abs() < 1e-12)
                }));
            }
        }
        let mut sampler = Sampler::new(&m, i).unwrap();
        for _ in 0..100 {
            let sample = sampler.sample(&m).unwrap();
            let (v, _) = mdp_reach(&sample, &ReachQuery::new(target.clone(), Sense::Max, Sense::Max)).unwrap();
            for s in 0..n {
                assert!(lo.0[s] - 1e-7 <= v.0[s] && v.0[s] <= hi.0[s] + 1e-7, "model {i} state {s}");
            }
        }
    }
}

#[test]
fn parse_write_parse_is_identity() {
    let mut r = rng(6);
    for _ in 0..200 {
        let m = random_bmdp(&mut r, small());
        let text = write_bmdp(&m);
        let Model::Plain(back) = parse_model(&text).unwrap() else { panic!("plain model expected") };
        assert_eq!(back, m);
        assert_eq!(write_bmdp(&back), text);
    }
}

fn letters(k: usize) -> Vec<String> {
    ["x", "y", "z"][..k].iter().map(|s| s.to_string()).collect()
}

fn random_labelled(r: &mut ChaCha8Rng, shape: RandomShape, k: usize) -> LabelledBmdp {
    let m = random_bmdp(r, shape);
    let labels = (0..m.num_states()).map(|_| letters(k)[r.gen_range(0..k)].clone()).collect();
    LabelledBmdp::new(m.with_acceptance(Default::default()), labels).unwrap()
}

fn random_dra(r: &mut ChaCha8Rng, k: usize) -> Dra {
    let q = r.gen_range(1..=3);
    let trans = (0..q).map(|_| (0..k).map(|_| StateId(r.gen_range(0..q))).collect()).collect();
    Dra::new(
        Alphabet::new(letters(k)).unwrap(),
        (0..q).map(|i| format!("p{i}")).collect(),
        StateId(0),
        trans,
        random_acceptance(r, q, 2),
    )
    .unwrap()
}

#[test]
fn labelled_round_trip() {
    let mut r = rng(7);
    for _ in 0..50 {
        let m = random_labelled(&mut r, small(), 3);
        let Model::Labelled(back) = parse_model(&write_labelled(&m)).unwrap() else { panic!("labelled") };
        assert_eq!(back, m);
    }
}

#[test]
fn products_are_feasible_and_reachable() {
    let mut r = rng(8);
    for _ in 0..100 {
        let m = random_labelled(&mut r, small(), 2);
        let dra = random_dra(&mut r, 2);
        let p = build_product(&m, &dra).unwrap();
        assert!(p.rows().iter().all(|row| row.is_feasible()));
        let sk = p.skeleton();
        let mut seen = BTreeSet::from([sk.initial()]);
        let mut stack = vec![sk.initial()];
        while let Some(s) = stack.pop() {
            for &a in sk.available(s) {
                for &(t, b) in p.row(a).entries() {
                    if b.hi > 0.0 && seen.insert(t) {
                        stack.push(t);
                    }
                }
            }
        }
        assert_eq!(seen.len(), sk.num_states());
    }
}

/// On deterministic chains the product value at the initial state is 1
/// exactly when the automaton accepts the chain's single word.
#[test]
fn product_agrees_with_lasso_acceptance() {
    let mut r = rng(9);
    let shape = RandomShape {
        max_states: 4,
        max_actions: 1,
        max_successors: 1,
        point_rows: 1.0,
        ..RandomShape::default()
    };
    for _ in 0..300 {
        let m = random_labelled(&mut r, shape, 3);
        let dra = random_dra(&mut r, 3);
        let sk = m.model().skeleton();
        let mut path = vec![sk.initial()];
        let loop_start = loop {
            let s = *path.last().unwrap();
            let next = m.model().row(sk.available(s)[0]).entries()[0].0;
            if let Some(k) = path.iter().position(|&t| t == next) {
                break k;
            }
            path.push(next);
        };
        let word: Vec<&str> = path.iter().map(|&s| m.label(s)).collect();
        let accepted = dra_accepts_lasso(&dra, &word[..loop_start], &word[loop_start..]).unwrap();

        let p = build_product(&m, &dra).unwrap();
        let mdp = p.point_mdp().unwrap();
        let psk = mdp.skeleton();
        let policy = PositionalPolicy::from_choices(psk.states().map(|s| Some(psk.available(s)[0])).collect());
        let v = mc_rabin(&induce_mc(&mdp, &policy).unwrap()).unwrap();
        let expected = if accepted { 1.0 } else { 0.0 };
        assert!((v.0[psk.initial().0] - expected).abs() < 1e-9);
    }
}

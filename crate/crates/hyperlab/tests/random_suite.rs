use hyperlab::gen::{program_suite, rng, random_hyperset};
use hyperlab::interpreter::{oracle_sem, sem};
use hyperlab::transformers::{post_hyper, post_structural, HyperSet};

#[test]
fn sem_matches_oracle() {
    let mut bad = 0;
    for (i, (s, sp)) in program_suite(1, 500, 4).iter().enumerate() {
        let a = sem(s, sp).unwrap();
        let b = oracle_sem(s, sp).unwrap();
        if a != b {
            bad += 1;
            eprintln!("#{i} {s} over {:?}\n sem {:?}\n orc {:?}", sp.config(), a, b);
        }
    }
    assert_eq!(bad, 0);
}

#[test]
fn structural_post_matches_elementwise() {
    let mut r = rng(2);
    for (s, sp) in program_suite(1, 500, 4) {
        let ps: HyperSet = random_hyperset(&mut r, sp.size(), 3).into_iter().collect();
        assert_eq!(post_structural(&s, &ps, &sp).unwrap(), post_hyper(&sem(&s, &sp).unwrap(), &ps), "{s}");
    }
}

use lessonlens::alignment::extract_objectives;
use lessonlens::bloom::{cdi_from_proportions, cognitive_profile, BloomLexicon, CognitiveProfile};
use lessonlens::corpus::{Framework, PlanDocument};
use proptest::prelude::*;

fn levels() -> impl Strategy<Value = Vec<Option<u8>>> {
    prop::collection::vec(prop::option::weighted(0.85, 1u8..=6), 0..30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cdi_matches_proportions(ls in levels()) {
        let p = CognitiveProfile::<f64>::from_levels(&ls);
        match p.cdi {
            Some(cdi) => {
                prop_assert!((cdi - cdi_from_proportions(&p.level_proportions)).abs() < 1e-9);
                prop_assert!((1.0..=6.0).contains(&cdi));
                prop_assert!((p.level_proportions.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
            None => {
                prop_assert_eq!(p.classified, 0);
                prop_assert_eq!(p.level_proportions, [0.0; 6]);
            }
        }
        prop_assert_eq!(p.classified + p.unclassified, ls.len());
    }

    #[test]
    fn order_does_not_matter(
        (ls, shuffled) in levels().prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
    ) {
        prop_assert_eq!(
            CognitiveProfile::<f64>::from_levels(&ls),
            CognitiveProfile::<f64>::from_levels(&shuffled)
        );
    }

    #[test]
    fn a_create_objective_raises_cdi(ls in levels()) {
        let before = CognitiveProfile::<f64>::from_levels(&ls);
        prop_assume!(before.cdi.is_some());
        let mut more = ls.clone();
        more.push(Some(6));
        let after = CognitiveProfile::<f64>::from_levels(&more);
        let (b, a) = (before.cdi.unwrap(), after.cdi.unwrap());
        if b < 6.0 {
            prop_assert!(a > b);
        } else {
            prop_assert_eq!(a, 6.0);
        }
    }
}

#[test]
fn objectives_flow_into_profile() {
    let plan = PlanDocument::from_text(
        "m",
        Framework::Tag,
        "## Learning Objectives\n- Identify the seven bands\n- List uses of microwaves\n- Explain c = λf\n- The spectrum",
    );
    let objectives = extract_objectives(&plan);
    assert_eq!(objectives.len(), 4);
    let p = cognitive_profile::<f64>(&objectives, &BloomLexicon::bloom_v1());
    assert_eq!((p.classified, p.unclassified), (3, 1));
    assert!((p.cdi.unwrap() - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn single_design_objective() {
    let plan = PlanDocument::from_text("m", Framework::Tag, "Students will be able to design a spectroscope.");
    let p = cognitive_profile::<f64>(&extract_objectives(&plan), &BloomLexicon::bloom_v1());
    assert_eq!(p.cdi, Some(6.0));
}

#[test]
fn f32_profiles() {
    let p = CognitiveProfile::<f32>::from_levels(&[Some(1), Some(2), Some(3)]);
    assert!((p.cdi.unwrap() - 2.0).abs() < 1e-6);
}

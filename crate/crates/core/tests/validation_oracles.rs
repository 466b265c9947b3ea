use qualibd_core::export::{decode_unchecked, to_json};
use qualibd_core::{validate, RuleId, Severity};
use qualibd_testkit::{
    count_blank_labels, count_isolated, model_with_defects, random_model, seeded,
};

fn count(diagnostics: &[qualibd_core::Diagnostic], rule: RuleId) -> usize {
    diagnostics.iter().filter(|d| d.rule_id == rule).count()
}

#[test]
fn seeded_defects_are_reported_exactly() {
    for seed in 0..200u64 {
        let mut rng = seeded(seed);
        let (k, m) = ((seed % 7) as usize, (seed % 5) as usize);
        let seeded = model_with_defects(&mut rng, 1 + (seed % 4) as usize, k, m);
        let found = validate(&seeded.model);
        assert_eq!(count(&found, RuleId::EmptyLabel), k, "seed {seed}");
        assert_eq!(count(&found, RuleId::EmptyConnections), m, "seed {seed}");
        assert!(found.iter().all(|d| d.severity != Severity::Error));
    }
}

#[test]
fn warnings_agree_with_brute_force_on_random_models() {
    for seed in 0..300u64 {
        let model = random_model(&mut seeded(seed), 70);
        let found = validate(&model);
        assert_eq!(
            count(&found, RuleId::EmptyLabel),
            count_blank_labels(&model)
        );
        assert_eq!(
            count(&found, RuleId::EmptyConnections),
            count_isolated(&model)
        );
        assert_eq!(count(&found, RuleId::DuplicateEdge), 0);
    }
}

#[test]
fn injected_duplicate_edges_are_errors() {
    for seed in 0..100u64 {
        let model = random_model(&mut seeded(seed), 60);
        let Some(edge) = model.edges().next() else {
            continue;
        };
        let extra = 1 + (seed % 3);
        let mut doc: serde_json::Value = serde_json::from_str(&to_json(&model)).unwrap();
        let edges = doc["edges"].as_array_mut().unwrap();
        for i in 0..extra {
            edges.push(serde_json::json!({
                "id": format!("e{}", model.next_id() + i),
                "kind": edge.kind.as_str(),
                "from": edge.from.to_string(),
                "to": edge.to.to_string(),
            }));
        }
        let broken = decode_unchecked(&doc.to_string()).unwrap();
        let found = validate(&broken);
        assert_eq!(
            count(&found, RuleId::DuplicateEdge) as u64,
            extra,
            "seed {seed}"
        );
        assert!(found
            .iter()
            .filter(|d| d.rule_id == RuleId::DuplicateEdge)
            .all(|d| d.severity == Severity::Error));
    }
}

#[test]
fn diagnostics_are_deterministically_ordered() {
    for seed in 0..50u64 {
        let model = random_model(&mut seeded(seed), 50);
        let a = validate(&model);
        assert_eq!(a, validate(&model.clone()));
        assert!(a.windows(2).all(|w| w[0].severity >= w[1].severity));
    }
}

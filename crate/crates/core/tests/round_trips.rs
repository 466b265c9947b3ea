use proptest::prelude::*;
use qualibd_core::dsl::{format, parse};
use qualibd_core::export::{from_json, layout, render_svg, to_dot, to_json, to_svg};
use qualibd_testkit::dot::check_dot;
use qualibd_testkit::{canonical, check_svg, random_model, seeded};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_format_round_trips(seed in any::<u64>(), steps in 0usize..80) {
        let model = random_model(&mut seeded(seed), steps);
        let text = format(&model).unwrap();
        let back = parse(&text).unwrap_or_else(|e| panic!("{e:?}\n{text}"));
        prop_assert_eq!(canonical(&back), canonical(&model));
        prop_assert_eq!(format(&back).unwrap(), text);
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), steps in 0usize..80) {
        let model = random_model(&mut seeded(seed), steps);
        let text = to_json(&model);
        let back = from_json(&text).unwrap();
        prop_assert_eq!(&back, &model);
        prop_assert_eq!(to_json(&back), text);
    }

    #[test]
    fn renderings_are_well_formed_and_stable(seed in any::<u64>(), steps in 0usize..80) {
        let model = random_model(&mut seeded(seed), steps);
        let dot = to_dot(&model);
        let summary = check_dot(&dot).unwrap_or_else(|e| panic!("{e}\n{dot}"));
        prop_assert_eq!(summary.edges, model.edge_count());
        prop_assert_eq!(to_dot(&model.clone()), dot);
        let svg = render_svg(&model);
        check_svg(&svg).unwrap();
        prop_assert_eq!(to_svg(&model, &layout(&model)).unwrap(), svg);
    }

    #[test]
    fn layout_boxes_do_not_overlap_when_unplaced(seed in any::<u64>(), steps in 0usize..60) {
        let mut model = random_model(&mut seeded(seed), steps);
        // The text format drops stored geometry.
        model = parse(&format(&model).unwrap()).unwrap();
        let l = layout(&model);
        let top: Vec<_> = model.top_level_nodes().map(|n| l.get(n.id).unwrap()).collect();
        for (i, a) in top.iter().enumerate() {
            for b in &top[i + 1..] {
                prop_assert!(!a.overlaps(b), "{:?} {:?}", a, b);
            }
        }
        for node in model.nodes().filter(|n| n.owner.is_some()) {
            let owner = l.get(node.owner.unwrap()).unwrap();
            prop_assert!(owner.strictly_contains(&l.get(node.id).unwrap()));
        }
    }

    #[test]
    fn parser_never_panics_and_spans_stay_inside(text in "\\PC{0,200}") {
        if let Err(errors) = parse(&text) {
            prop_assert!(!errors.is_empty());
            let lines: Vec<&str> = text.split('\n').collect();
            for e in errors {
                let (line, column) = (e.span.line as usize, e.span.column as usize);
                prop_assert!(line >= 1 && line <= lines.len(), "{:?}", e);
                let width = lines[line - 1].chars().count();
                prop_assert!(column >= 1 && column <= width + 1, "{:?}", e);
            }
        }
    }

    #[test]
    fn mutated_documents_never_panic(seed in any::<u64>(), cut in any::<prop::sample::Index>()) {
        let model = random_model(&mut seeded(seed), 30);
        let text = format(&model).unwrap();
        let chars: Vec<char> = text.chars().collect();
        let at = cut.index(chars.len().max(1));
        let broken: String = chars[..at].iter().chain(chars.get(at + 1..).unwrap_or(&[])).collect();
        let _ = parse(&broken);
        let json = to_json(&model);
        let _ = from_json(&json[..json.len() / 2]);
    }
}

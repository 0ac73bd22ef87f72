use menuprobe::games::{
    build_hardness_example, gen_info_acquisition, gen_security, identify_via_hardness_menu, EMPTY_TYPE_ID,
};
use menuprobe::learners::single_round_identify;
use menuprobe::model::utility;
use menuprobe::{Menu, SimulatedAgent, TypeId};

#[test]
fn info_acquisition_single_round() {
    for seed in 0..100 {
        let g = gen_info_acquisition(2, 2, 2 + seed as usize % 3, 2 + seed as usize % 9, seed).unwrap();
        assert_eq!(g.space.ambient_dim(), 4);
        for ty in &g.types {
            let out = single_round_identify(&g, &mut SimulatedAgent::new(ty.clone()), seed).unwrap();
            assert_eq!(&out.type_id, ty.id());
            assert_eq!(out.transcript.round_count(), 1);
        }
    }
}

#[test]
fn security_slice_report_is_attached() {
    let sg = gen_security(5, 2, 8, 3).unwrap();
    assert_eq!(sg.slice.space.effective_dim(), 1);
    assert!(sg.slice_report.no_dominant_ok.is_some());
    assert!(sg.slice_report.breakpoints_ok.is_some());
    assert_eq!(sg.slice_direction, vec![0.4; 5]);
}

#[test]
fn hardness_six_actions() {
    let ex = build_hardness_example(6, 60.0).unwrap();
    assert_eq!(ex.game.n_types(), 21);
    let Menu::Finite { items } = &ex.menu else {
        panic!("finite menu expected")
    };
    let ty = ex.game.type_by_id(&TypeId::from("{1,2,3}")).unwrap();
    let own = utility(ty, &items[0], ex.a_star).unwrap();
    assert!((own - 1.0 / 3600.0).abs() < 1e-15);
    for ty in &ex.game.types {
        let out = identify_via_hardness_menu(&ex, &mut SimulatedAgent::new(ty.clone())).unwrap();
        assert_eq!(&out.type_id, ty.id());
        assert_eq!(out.transcript.round_count(), 1);
    }
    let empty = ex.game.type_by_id(&TypeId::from(EMPTY_TYPE_ID)).unwrap();
    assert_eq!(empty.directions()[ex.a_star], vec![-1.0 / 60.0; 6]);
}

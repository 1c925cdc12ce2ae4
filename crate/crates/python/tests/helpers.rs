use pyraywave::{final_front, load};
use raywave::io::{emit_config, preset_config};

#[test]
fn coupling_override_resets_a_default_step() {
    let text = emit_config(&preset_config("gaussian").unwrap());
    let on = load(&text, None).unwrap();
    let off = load(&text, Some(false)).unwrap();
    assert!(!off.coupling_enabled);
    assert_eq!(off.dt, off.default_dt());
    assert!(off.dt > on.dt);
    assert!(load("[scenario]\nepsilom = 1\n", None).is_err());
}

#[test]
fn final_front_columns_line_up() {
    let mut c = preset_config("multi-slit").unwrap();
    c.n_rays = 101;
    c.z_end = 10.0;
    c.dt = 1.0;
    let r = raywave::dynamics::run(c).unwrap();
    let (x, px, i) = final_front(&r);
    assert_eq!((x.len(), px.len(), i.len()), (101, 101, 101));
    assert_eq!(i.iter().cloned().fold(0.0, f64::max), 1.0);
}

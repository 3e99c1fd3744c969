use giantgyro::config::{RunConfig, StructureName};
use proptest::prelude::*;

fn structure_name() -> impl Strategy<Value = StructureName> {
    prop_oneof![
        Just(StructureName::SeparatedI),
        Just(StructureName::SeparatedIi),
        Just(StructureName::NestedI),
        Just(StructureName::NestedIi),
        Just(StructureName::BraidedI),
        Just(StructureName::BraidedIi),
        Just(StructureName::Coincident),
        Just(StructureName::Direct),
    ]
}

fn config() -> impl Strategy<Value = RunConfig> {
    (
        any::<u64>(),
        prop::array::uniform8(-1e6f64..1e6),
        (0.0f64..10.0, 1e-6f64..1.0),
        (
            structure_name(),
            prop::option::of(1u32..9),
            prop::option::of(1u32..9),
            prop::option::of(1u32..5),
        ),
        (
            prop::array::uniform4(-10.0f64..10.0),
            1usize..5000,
            any::<bool>(),
            1u32..100,
        ),
    )
        .prop_map(
            |(seed, v, (co, tau), (topology, n, m, nest), (d, steps, markovian, k))| {
                let mut c = RunConfig {
                    seed,
                    ..RunConfig::default()
                };
                c.system.kappa_a = v[0];
                c.system.kappa_b = v[1];
                c.system.gamma_x = v[2];
                c.system.gamma_y = v[3];
                c.system.omega_rot = v[4];
                c.system.delta_a = v[5];
                c.system.delta_b = v[6];
                c.system.phi = v[7];
                c.system.co = co;
                c.system.tau = tau;
                c.structure.topology = topology;
                c.structure.n = n;
                c.structure.m = m;
                c.structure.nest_index = nest;
                c.drive.alpha_re = d[0];
                c.drive.alpha_im = d[1];
                c.drive.ratio = d[2].abs();
                c.drive.theta = d[3];
                c.sweep.phi_steps = steps;
                c.dynamics.markovian = markovian;
                c.dynamics.steps_per_tau = k;
                c
            },
        )
}

proptest! {
    #[test]
    fn serialization_is_idempotent(c in config()) {
        let text = c.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml(), text);
    }
}

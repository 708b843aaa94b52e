macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(inscribed_ball);
example!(outer_polytope);
example!(separation_bound);
example!(witness_engine);
example!(bang_planks);
example!(covering_sweep);

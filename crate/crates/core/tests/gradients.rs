//! Analytic gradients against central finite differences.

mod common;

use common::{random_bag, random_params, small_config, small_vocab};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relbias::model::{loss_and_gradient, Encoder, Selector};

const EPS: f64 = 1e-4;

#[test]
fn analytic_gradients_match_central_differences() {
    let vocab = small_vocab();
    for encoder in [Encoder::Cnn, Encoder::Pcnn] {
        for selector in [Selector::Att, Selector::Ave] {
            let config = small_config(encoder, selector);
            for bag_seed in 0..3u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(100 + bag_seed);
                let params = random_params(&config, vocab.len(), &mut rng);
                let bag = random_bag(bag_seed, &config, &vocab);
                let (_, analytic) = loss_and_gradient(&bag, &params, &config);

                let mut probe = params.clone();
                for (g, (name, grad)) in analytic.groups().iter().enumerate() {
                    let mut diff2 = 0.0;
                    let mut sum2 = 0.0;
                    for k in 0..grad.data.len() {
                        let orig = probe.groups()[g].1.data[k];
                        probe.groups_mut()[g].1.data[k] = orig + EPS;
                        let (up, _) = loss_and_gradient(&bag, &probe, &config);
                        probe.groups_mut()[g].1.data[k] = orig - EPS;
                        let (down, _) = loss_and_gradient(&bag, &probe, &config);
                        probe.groups_mut()[g].1.data[k] = orig;
                        let numeric = (up - down) / (2.0 * EPS);
                        diff2 += (numeric - grad.data[k]).powi(2);
                        sum2 += numeric.powi(2) + grad.data[k].powi(2);
                    }
                    let rel = if sum2 == 0.0 { 0.0 } else { diff2.sqrt() / sum2.sqrt() };
                    assert!(
                        rel < 1e-4,
                        "{encoder:?}/{selector:?} bag {bag_seed} group {name}: relative error {rel:e}"
                    );
                }
            }
        }
    }
}

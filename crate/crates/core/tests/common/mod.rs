#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strandfold::strands::{parse_system, StrandSystem};

#[derive(Debug, Clone)]
pub struct Instance {
    pub text: String,
    pub system: StrandSystem,
}

fn random_seq(rng: &mut ChaCha8Rng, len: usize, rna: bool) -> String {
    let alphabet: [char; 4] = if rna { ['A', 'C', 'G', 'U'] } else { ['A', 'C', 'G', 'T'] };
    (0..len).map(|_| *alphabet.choose(rng).expect("non-empty")).collect()
}

fn reverse_complement(seq: &str, rna: bool) -> String {
    seq.chars()
        .rev()
        .map(|c| match c {
            'A' => if rna { 'U' } else { 'T' },
            'T' | 'U' => 'A',
            'G' => 'C',
            _ => 'G',
        })
        .collect()
}

/// System file text.
fn render(strands: &[(String, usize)]) -> String {
    strands.iter().enumerate().map(|(k, (s, n))| format!("s{k} {s} {n}\n")).collect()
}

/// Randomized systems with c <= 4, strand lengths 2..=6 and N <= 16,
/// mixing free sequences with forced-symmetric multisets.
pub fn corpus(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let rna = rng.gen_bool(0.5);
        let shape = rng.gen_range(0..8);
        let mut strands: Vec<(String, usize)> = Vec::new();
        match shape {
            0 => {
                let len = rng.gen_range(2..=6);
                strands.push((random_seq(&mut rng, len, rna), 1));
            }
            1 => {
                let c = rng.gen_range(2..=4);
                for _ in 0..c {
                    let len = rng.gen_range(2..=(16 / c).min(6));
                    strands.push((random_seq(&mut rng, len, rna), 1));
                }
            }
            2 => {
                let len = rng.gen_range(2..=6);
                strands.push((random_seq(&mut rng, len, rna), 2));
            }
            3 => {
                let len = rng.gen_range(2..=5);
                strands.push((random_seq(&mut rng, len, rna), 3));
            }
            4 => {
                let len = rng.gen_range(2..=4);
                strands.push((random_seq(&mut rng, len, rna), 4));
            }
            5 => {
                let a = rng.gen_range(2..=4);
                let b = rng.gen_range(2..=4);
                strands.push((random_seq(&mut rng, a, rna), 2));
                strands.push((random_seq(&mut rng, b, rna), 2));
            }
            6 => {
                let a = rng.gen_range(2..=5);
                let x = random_seq(&mut rng, a, rna);
                let y = reverse_complement(&x, rna);
                strands.push((x, 2));
                strands.push((y, 1));
            }
            _ => {
                // self-complementary halves pair well with themselves
                let half = rng.gen_range(1..=3);
                let x = random_seq(&mut rng, half, rna);
                let s = format!("{x}{}", reverse_complement(&x, rna));
                let copies = rng.gen_range(2..=(16 / s.len()).min(4));
                strands.push((s, copies));
            }
        }
        let n: usize = strands.iter().map(|(s, k)| s.len() * k).sum();
        if n > 16 {
            continue;
        }
        let text = render(&strands);
        match parse_system(&text) {
            Ok(system) => out.push(Instance { text, system }),
            Err(_) => continue,
        }
    }
    out
}

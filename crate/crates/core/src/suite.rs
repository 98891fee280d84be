//! The builtin instance suite: small families (n ≤ 12) from every generator,
//! chosen so each exact computation, LP included, stays at desk scale.

use crate::error::Result;
use crate::family::MintermFamily;
use crate::generators::{gen_all_k_subsets, gen_graph, gen_random, gen_single, gen_star, GraphSpec, Pattern};

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub family: MintermFamily,
}

impl Instance {
    fn new(id: impl Into<String>, family: MintermFamily) -> Self {
        Self { id: id.into(), family }
    }
}

fn lists(n: usize, minterms: &[&[usize]]) -> Result<MintermFamily> {
    let owned: Vec<Vec<usize>> = minterms.iter().map(|m| m.to_vec()).collect();
    MintermFamily::from_index_lists(n, &owned)
}

pub fn builtin_suite() -> Result<Vec<Instance>> {
    let mut out = vec![Instance::new("f1", lists(3, &[&[0, 1], &[1, 2]])?)];

    for (n, k) in [(1, 1), (3, 2), (4, 4), (5, 3), (6, 2), (8, 5), (10, 1), (12, 3)] {
        out.push(Instance::new(format!("single_n{n}_k{k}"), gen_single(n, k)?));
    }
    for n in [3, 4, 5, 6, 9, 12] {
        out.push(Instance::new(format!("star_n{n}"), gen_star(n)?));
    }
    for (n, k) in [(2, 1), (5, 1), (10, 1), (12, 1), (4, 2), (5, 2), (7, 2), (4, 3), (5, 3), (6, 3)] {
        let id = if k == 1 { format!("sing_n{n}") } else { format!("all_k_n{n}_k{k}") };
        out.push(Instance::new(id, gen_all_k_subsets(n, k)?));
    }

    let graphs = [
        ("triangle_k4", 4, Pattern::Triangle),
        ("triangle_k5", 5, Pattern::Triangle),
        ("k4_k4", 4, Pattern::K4),
        ("k4_k5", 5, Pattern::K4),
        ("path1_k4", 4, Pattern::Path(1)),
        ("path2_k4", 4, Pattern::Path(2)),
        ("path3_k4", 4, Pattern::Path(3)),
        ("path2_k5", 5, Pattern::Path(2)),
        ("matching2_k4", 4, Pattern::Custom(vec![(0, 1), (2, 3)])),
        ("claw_k4", 4, Pattern::Custom(vec![(0, 1), (0, 2), (0, 3)])),
    ];
    for (id, m, pattern) in graphs {
        out.push(Instance::new(id, gen_graph(&GraphSpec { m, pattern })?));
    }

    for (n, k, count, seed) in [
        (6, 2, 3, 1),
        (6, 2, 5, 2),
        (7, 3, 4, 3),
        (8, 2, 6, 4),
        (8, 3, 4, 5),
        (9, 3, 3, 6),
        (10, 2, 5, 7),
        (10, 3, 4, 8),
        (11, 4, 3, 9),
        (12, 2, 4, 10),
        (12, 3, 3, 11),
        (8, 4, 3, 12),
    ] {
        out.push(Instance::new(
            format!("random_n{n}_k{k}_c{count}_s{seed}"),
            gen_random(n, k, count, seed)?,
        ));
    }

    let mixed: [(&str, usize, &[&[usize]]); 8] = [
        ("mixed_1_2_3", 6, &[&[0], &[1, 2], &[3, 4, 5]]),
        ("cycle4", 4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]),
        ("tribes_3x2", 6, &[&[0, 1], &[2, 3], &[4, 5]]),
        ("tribes_2x3", 6, &[&[0, 1, 2], &[3, 4, 5]]),
        ("mixed_chain", 5, &[&[0, 1, 2], &[2, 3], &[4]]),
        ("sunflower_3", 7, &[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6]]),
        ("pair_or_triple", 8, &[&[0, 1], &[2, 3, 4], &[5, 6, 7], &[1, 5]]),
        ("loose_path", 7, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6]]),
    ];
    for (id, n, minterms) in mixed {
        out.push(Instance::new(id, lists(n, minterms)?));
    }
    Ok(out)
}

use alloc::vec::Vec;

use super::mask::{neighbors8, BinaryMask, RING};
use crate::image::Pixel;

/// One-pixel-wide 8-connected skeleton by two-subiteration Guo-Hall
/// thinning, followed by removal of staircase corners (simple points with
/// three or more neighbours). Scans are row-major.
pub fn skeletonize(mask: &BinaryMask) -> BinaryMask {
    let mut m = guo_hall(mask);
    while remove_staircases(&mut m) {}
    m
}

/// Guo-Hall thinning alone, iterated to a fixed point.
pub fn guo_hall(mask: &BinaryMask) -> BinaryMask {
    let mut m = mask.clone();
    loop {
        let a = thinning_pass(&mut m, 0);
        let b = thinning_pass(&mut m, 1);
        if !a && !b {
            break;
        }
    }
    m
}

fn ring_bits(m: &BinaryMask, p: Pixel) -> [bool; 8] {
    let mut out = [false; 8];
    for (o, (dx, dy)) in out.iter_mut().zip(RING) {
        *o = m.get(Pixel::new(p.x + dx, p.y + dy));
    }
    out
}

fn thinning_pass(m: &mut BinaryMask, step: usize) -> bool {
    let mut delete = Vec::new();
    for p in m.pixels() {
        let [p2, p3, p4, p5, p6, p7, p8, p9] = ring_bits(m, p);
        let c = (!p2 && (p3 || p4)) as u8
            + (!p4 && (p5 || p6)) as u8
            + (!p6 && (p7 || p8)) as u8
            + (!p8 && (p9 || p2)) as u8;
        if c != 1 {
            continue;
        }
        let n1 = (p9 || p2) as u8 + (p3 || p4) as u8 + (p5 || p6) as u8 + (p7 || p8) as u8;
        let n2 = (p2 || p3) as u8 + (p4 || p5) as u8 + (p6 || p7) as u8 + (p8 || p9) as u8;
        if !(2..=3).contains(&n1.min(n2)) {
            continue;
        }
        let keep = if step == 0 {
            (p2 || p3 || !p5) && p4
        } else {
            (p6 || p7 || !p9) && p8
        };
        if !keep {
            delete.push(p);
        }
    }
    for p in &delete {
        m.set(*p, false);
    }
    !delete.is_empty()
}

/// A foreground pixel is simple when deleting it changes neither the number
/// of 8-connected foreground components nor 4-connected background
/// components in its 3x3 window.
fn is_simple(r: &[bool; 8]) -> bool {
    // Foreground components among ring pixels (8-adjacency within the ring,
    // centre excluded).
    let fg: Vec<usize> = (0..8).filter(|&i| r[i]).collect();
    let fg_components = count_components(&fg, |a, b| {
        let (ax, ay) = RING[a];
        let (bx, by) = RING[b];
        (ax - bx).abs() <= 1 && (ay - by).abs() <= 1
    });
    // Background components that touch the centre's 4-neighbourhood.
    let bg: Vec<usize> = (0..8).filter(|&i| !r[i]).collect();
    let four_adjacent = |a: usize, b: usize| {
        let (ax, ay) = RING[a];
        let (bx, by) = RING[b];
        (ax - bx).abs() + (ay - by).abs() == 1
    };
    let mut labels = [usize::MAX; 8];
    let mut next = 0;
    for &s in &bg {
        if labels[s] != usize::MAX {
            continue;
        }
        labels[s] = next;
        let mut stack = alloc::vec![s];
        while let Some(a) = stack.pop() {
            for &b in &bg {
                if labels[b] == usize::MAX && four_adjacent(a, b) {
                    labels[b] = next;
                    stack.push(b);
                }
            }
        }
        next += 1;
    }
    let mut touching = [false; 8];
    for i in [0usize, 2, 4, 6] {
        if !r[i] {
            touching[labels[i]] = true;
        }
    }
    let bg_components = touching.iter().filter(|&&t| t).count();
    fg_components == 1 && bg_components == 1
}

fn count_components(nodes: &[usize], adjacent: impl Fn(usize, usize) -> bool) -> usize {
    let mut seen = [false; 8];
    let mut count = 0;
    for &s in nodes {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = alloc::vec![s];
        while let Some(a) = stack.pop() {
            for &b in nodes {
                if !seen[b] && adjacent(a, b) {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    count
}

fn remove_staircases(m: &mut BinaryMask) -> bool {
    let mut changed = false;
    let candidates: Vec<Pixel> = m.pixels().collect();
    for p in candidates {
        let degree = neighbors8(p).filter(|&q| m.get(q)).count();
        if degree < 3 {
            continue;
        }
        let r = ring_bits(m, p);
        if is_simple(&r) {
            m.set(p, false);
            changed = true;
        }
    }
    changed
}

/// A move on the lifted grid: spatial step in pixels and a bin shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Offset {
    pub dx: i32,
    pub dy: i32,
    pub dk: i32,
}

const fn o(dx: i32, dy: i32, dk: i32) -> Offset {
    Offset { dx, dy, dk }
}

macro_rules! with_turns {
    ($(($dx:expr, $dy:expr)),* $(,)?) => {
        [
            $(o($dx, $dy, -1), o($dx, $dy, 0), o($dx, $dy, 1),)*
            o(0, 0, -1),
            o(0, 0, 1),
        ]
    };
}

/// The sixteen primitive directions of the 5x5 neighbourhood, each combined
/// with a bin shift in `{-1, 0, 1}`, followed by the two pure rotations.
pub const STENCIL: [Offset; 50] = with_turns!(
    (1, 0),
    (2, 1),
    (1, 1),
    (1, 2),
    (0, 1),
    (-1, 2),
    (-1, 1),
    (-2, 1),
    (-1, 0),
    (-2, -1),
    (-1, -1),
    (-1, -2),
    (0, -1),
    (1, -2),
    (1, -1),
    (2, -1),
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_symmetric_and_distinct() {
        for (i, a) in STENCIL.iter().enumerate() {
            assert!(STENCIL.contains(&o(-a.dx, -a.dy, -a.dk)));
            assert!(a.dx != 0 || a.dy != 0 || a.dk != 0);
            assert!(!STENCIL[i + 1..].contains(a));
        }
    }
}

//! Inputs every parser must reject with a positioned error.

pub const BAD_FORMULAS: &[&str] = &[
    "",
    "   ",
    "a",
    "a=",
    "=1",
    "a==1",
    "(a=1",
    "a=1)",
    "a=1 &",
    "& a=1",
    "a=1 | | b=2",
    "a=1 -> ",
    "!",
    "!!",
    "()",
    "a=1 b=2",
    "1a=2",
    "a=1 && b=2",
    "a=1 => b=2",
    "a=-",
    "a=--1",
    "a=1 -",
    "a=é",
    "ä=1",
    "a=1 & (b=2 | c=3",
    "((((a=1))))) ",
    "a = 1 ~ b = 2",
    "a=1\n&",
    "a=$",
    "-> a=1",
];

pub const BAD_FORMATIONS: &[&str] = &[
    "",
    "(",
    ")",
    "cross (set)",
    "(cross)",
    "(cross (set)",
    "(cross (set)))",
    "(cross (sets))",
    "(9cross (set))",
    "(cross (set (between roomba 0 roomba 1)))",
    "(cross (set (between roomba 0 roomba 1 roomba)))",
    "(cross (set (between roomba x roomba 1 roomba 2)))",
    "(cross (set (between roomba -1 roomba 1 roomba 2)))",
    "(cross (set (between 7 0 roomba 1 roomba 2)))",
    "(cross (set (beside roomba 0 roomba 1 roomba 2)))",
    "(cross (set (max-dist 0 roomba 0 (between roomba 0 roomba 1 roomba 2))))",
    "(cross (set (max-dist -0.5 roomba 0 (between roomba 0 roomba 1 roomba 2))))",
    "(cross (set (max-dist far roomba 0 (between roomba 0 roomba 1 roomba 2))))",
    "(cross (set (max-dist inf roomba 0 (between roomba 0 roomba 1 roomba 2))))",
    "(cross (set (max-dist 0.25 roomba 0 (not-between roomba 0 roomba 1 roomba 2))))",
    "(cross (set (max-dist 0.25 roomba 0 between roomba 0 roomba 1 roomba 2)))",
    "(cross (set (between roomba 0 roomba 1 roomba 2 roomba 3)))",
    "(cross (set (between roomba 0 roomba 1 roomba 2)) extra)",
    "(cross\n  (set\n    (between roomba 0 roomba 1 roomba 99999999999)))",
    "(cross (set (between roomba 0 roomba 1 roomba 2)))(again (set))",
    "(cröss (set))",
    "(cross (set (between roomba 0 roomba 1 roomba 9)))",
];

/*! Finite double categories, computationally.

A double category has objects, horizontal morphisms, vertical morphisms, and
squares; squares compose side by side and stacked, subject to interchange.
This crate stores such structures with explicit finite tables and implements
the standard constructions on them:

- free double categories on derivation schemes and quotients by congruences
  ([`construct`]);
- pasting diagrams: subdivisions of a rectangle, allowability, cut trees, and
  evaluation of labeled arrangements ([`arrange`]);
- colimits of categories and double categories, including closed-form
  pushouts along product inclusions ([`colim`]);
- horizontal, vertical, double, and diagonal nerves ([`nerve`]), and the
  left adjoint of the horizontal nerve ([`categorify`]);
- weak equivalences, fibrations, and cofibrancy for the simplicial,
  categorical, and trivial surjectivity notions ([`model`]);
- double barycentric subdivisions of simplices, horns, and boundaries, and
  the generating inclusions built from them ([`thomason`]).

Everything is deterministic: collections are ordered, derived identifiers are
constructed, and searches fix a traversal order. Potentially explosive
operations take a [`budget::Budget`] and fail loudly instead of diverging.

The `dblcat` binary in the companion crate exposes these operations over a
JSON document format; see [`doc`] for the format itself.
*/

pub mod arrange;
pub mod budget;
pub mod categorify;
pub mod colim;
pub mod construct;
pub mod core;
pub mod nerve;
pub mod thomason;

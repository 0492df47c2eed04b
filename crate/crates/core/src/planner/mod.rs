//! Ant-colony search over plans.
//!
//! Ants build a solution one leg at a time: first the whole target sequence,
//! then the transfer types. Choices are drawn by roulette over pheromone
//! values recomputed from the feasible list at every decision, and partial
//! solutions already proven infeasible are never proposed again.

pub mod coding;
pub mod construct;
pub mod lists;
pub mod search;

pub use coding::{canonical, decode, encode, CodingError, SolutionVector, TypeTable};
pub use construct::{generate_sequence, generate_types, roulette_select};
pub use lists::{record_result, Evaluation, FeasibleEntry, FeasibleList, TabooLists};
pub use search::{
    ant_rng, model_evaluation, search, search_with, RunStats, SearchConfig, SearchResult,
    SearchStep,
};

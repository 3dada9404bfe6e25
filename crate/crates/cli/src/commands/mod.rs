pub mod build_catalog;
pub mod build_morph;
pub mod eval;
pub mod mine_wiki;
pub mod run;

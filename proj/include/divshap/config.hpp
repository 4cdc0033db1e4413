#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "divshap/pipeline.hpp"

namespace divshap {

/// Reads `key = value` lines ('#' starts a comment) on top of `base`.
///
/// Keys: kappa, workers, same_class_only, mining.min_len, mining.max_len,
/// mining.length_stride, mining.position_stride, mining.sax_filter,
/// sax.word_length, sax.alphabet_size, sax.iterations, sax.keep_fraction,
/// sax.mask_size, sax.seed, distance.normalize_windows,
/// distance.length_normalize, elm.hidden_nodes, elm.activation, elm.seed,
/// elm.ridge, eval.mode, eval.folds, eval.repeats, eval.seed.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Applies one setting; throws InvalidArgument on unknown keys or bad values.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);

}  // namespace divshap

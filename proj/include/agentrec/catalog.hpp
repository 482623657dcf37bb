#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "agentrec/types.hpp"

namespace agentrec {

/// Catalog file: one item per line, tab-separated, `#` lines are comments.
///
///     item_id <TAB> name <TAB> attributes <TAB> context_affinity <TAB> popularity <TAB> novelty
///
/// `attributes` holds V comma-separated values in [0,1]; `context_affinity`
/// holds 12. Every line must use the same V and item ids must be unique.
std::vector<Candidate> parse_catalog(std::string_view text);
std::vector<Candidate> load_catalog(const std::filesystem::path& path);

std::string format_catalog(const std::vector<Candidate>& items);
void save_catalog(const std::vector<Candidate>& items, const std::filesystem::path& path);

/// Throws InvalidConfig on duplicate ids, ragged or non-finite vectors.
void validate_catalog(const std::vector<Candidate>& items);

}  // namespace agentrec

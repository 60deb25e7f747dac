#pragma once

#include <map>

#include "rsyn/certify.hpp"
#include "rsyn/model.hpp"
#include "rsyn/post.hpp"

namespace rsyn {

struct EncodingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What an SMT variable name stands for.
struct DecodeInfo {
  enum Kind { input_selector, rank, member };
  Kind kind;
  CellId cell; // control cell for selectors/ranks, partition cell for members
};

struct EncodedProblem {
  std::string smtlib;
  Variant variant = Variant::weakened;
  unsigned k = 1;
  std::map<std::string, DecodeInfo> decode_map;
  size_t assertion_count = 0;
  size_t predicted_assertions = 0; // closed-form estimate from table shape
  std::uint64_t problem_hash = 0;
  std::uint64_t text_hash = 0;
};

/// Weakened rules over the under-approximate successor sets (Must search).
EncodedProblem encode_weakened(const Problem& problem, const Partition& partition,
                               const SuccessorTable& table);
/// Strengthened rules over the over-approximate successor sets (May search).
EncodedProblem encode_strengthened(const Problem& problem, const Partition& partition,
                                   const SuccessorTable& table);
/// Basic rules; requires every non-escaping post image to be an exact cell
/// union, else throws EncodingError with a diagnostic.
EncodedProblem encode_exact(const Problem& problem, const Partition& partition,
                            const SuccessorTable& table);

struct DecodedModel {
  Controller controller;
  RankingFunction ranking;
  std::set<CellId> members;
};

/// Extracts a model produced by the solver back into controller, ranking,
/// and membership set. Throws EncodingError when an assignment is missing.
DecodedModel decode_model(const EncodedProblem& encoded, const Problem& problem,
                          const std::string& model_text);

/// Assembles a certificate from a decoded model.
Certificate make_certificate(const DecodedModel& model, Variant variant, unsigned k,
                             const Partition& partition);

} // namespace rsyn

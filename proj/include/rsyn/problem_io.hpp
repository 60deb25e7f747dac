#pragma once

#include <nlohmann/json_fwd.hpp>

#include "rsyn/certify.hpp"
#include "rsyn/model.hpp"
#include "rsyn/post.hpp"

namespace rsyn {

inline constexpr const char* kProblemFormat = "reach-synth/1";
inline constexpr const char* kCertificateFormat = "reach-synth-cert/1";
inline constexpr const char* kTableFormat = "reach-synth-table/1";

nlohmann::json box_to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);

nlohmann::json problem_to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& j);

Problem load_problem(const std::string& path);
void save_problem(const Problem& problem, const std::string& path);

/// Canonical content hash of a problem (hash of its canonical JSON text).
std::uint64_t problem_hash(const Problem& problem);
std::string hash_hex(std::uint64_t h);

nlohmann::json certificate_to_json(const Certificate& cert, const Partition& partition,
                                   const Problem& problem);
/// Returns the certificate plus the partition it refers to.
std::pair<Certificate, Partition> certificate_from_json(const nlohmann::json& j);

nlohmann::json partition_to_json(const Partition& p);
Partition partition_from_json(const nlohmann::json& j);

/// Successor-table cache, keyed by hash of (system, partition, inputs).
std::uint64_t table_cache_key(const Problem& problem, const Partition& partition);
nlohmann::json table_to_json(const SuccessorTable& table, std::uint64_t key);
SuccessorTable table_from_json(const nlohmann::json& j);
/// Loads a cached table if present and matching; nullopt otherwise.
std::optional<SuccessorTable> load_cached_table(const std::string& dir,
                                                const Problem& problem,
                                                const Partition& partition);
void store_cached_table(const std::string& dir, const Problem& problem,
                        const Partition& partition, const SuccessorTable& table);

} // namespace rsyn

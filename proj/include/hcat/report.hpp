#pragma once

#include <json.hpp>

#include "hcat/asymptotics.hpp"
#include "hcat/comparison.hpp"
#include "hcat/halfspace.hpp"
#include "hcat/profile.hpp"

namespace hcat {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "hcat";
inline constexpr const char* kToolVersion = "0.1.0";

Json to_json(const IntegratorConfig& cfg, double r0);
Json to_json(const BranchTermination& t);
Json to_json(const EndClassification& e);
Json to_json(const GrowthFit& g);
Json to_json(const EquivalenceReport& r);
Json to_json(const ComparisonReport& r);
Json to_json(const NecksizeReport& r);
Json to_json(const TransferReport& r);
Json to_json(const CoverReport& r);
Json to_json(const Minorant& m);
Json to_json(const HalfSpaceCertificate& c);

/// Serialized text: two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace hcat

// JSON ingestion and serialization of instance documents.
//
// Document layout:
//   {
//     "topology": {"nodes": [{"id", "tier"}], "links": [{"from", "to", "length_m"}]},
//     "modes": <count> | {"count": n, "labels": [..]},
//     "crosstalk_db_per_100m": [[null, y01, ...], ...],   // aggressor row x victim column
//     "frame": {"frame_ms", "slice_ms", "guard_us"?},
//     "planner": {"xt_threshold_db", "link_capacity_gbps", "accumulation_model",
//                 "objective_mode", "big_m"?, "granularity_gbps"?},
//     "requests": [{"id", "src", "dst", "bandwidth_gbps"}]
//   }

#ifndef MMFPLAN_INSTANCE_IO_HPP_
#define MMFPLAN_INSTANCE_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mmfplan/model.hpp"

namespace mmfplan {

using Json = nlohmann::ordered_json;

// Parses text into JSON; syntax errors become kParse errors naming `source`
// and the byte offset.
Json parse_json(std::string_view text, std::string_view source = "<input>");
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Builds and validates an Instance. Throws ValidationError listing every
// problem with its field path.
Instance load_instance(const Json& doc);
Instance load_instance_file(const std::filesystem::path& path);

Json to_json(const Instance& instance);

Topology load_topology(const Json& topology_doc);
Json to_json(const Topology& topology);

// Resolves a request list against `topology`.
std::vector<Request> load_requests(const Json& requests_doc,
                                   const Topology& topology);
Json requests_to_json(const std::vector<Request>& requests,
                      const Topology& topology);

}  // namespace mmfplan

#endif  // MMFPLAN_INSTANCE_IO_HPP_

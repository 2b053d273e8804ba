// ASCII occupancy grid for one link: a row per mode, a column per slot.

#ifndef MMFPLAN_TIMELINE_HPP_
#define MMFPLAN_TIMELINE_HPP_

#include <optional>
#include <string>

#include "mmfplan/model.hpp"
#include "mmfplan/schedule.hpp"

namespace mmfplan {

// Request index -> grid character: A..Z, then '#'.
char request_letter(RequestIndex r);

// Grid for `link`, or for every link carrying traffic when unset. Cells show
// the occupying request's letter or '.'; slots are separated by '|' when the
// frame has a guard interval. A legend follows each grid.
std::string render_timeline(const Instance& instance, const Schedule& schedule,
                            std::optional<LinkIndex> link = std::nullopt);

}  // namespace mmfplan

#endif  // MMFPLAN_TIMELINE_HPP_

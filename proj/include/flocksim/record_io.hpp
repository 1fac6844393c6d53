#pragma once

#include <string>
#include <string_view>

#include "flocksim/domain.hpp"

namespace flocksim {

/// Appends `record` as one JSON object followed by '\n'. Reals use the
/// shortest representation that round-trips, so write(parse(write(r)))
/// reproduces the same bytes. Throws std::invalid_argument on non-finite
/// values.
void append_record_json(std::string& out, const RoundRecord& record);

std::string record_to_json(const RoundRecord& record);

/// Parses one log line. Throws ParseError (line 0) on malformed input.
RoundRecord parse_record(std::string_view line);

}  // namespace flocksim

#pragma once

#include <string>
#include <string_view>

namespace potus {

enum class Party { Democratic, Republican, Other };

std::string_view party_name(Party p);
Party party_from_name(std::string_view name);

/// One debate participant: the display name judges write about and the
/// ALL-CAPS label the transcript attributes turns with.
struct CandidateRef {
    std::string display_name;
    Party party = Party::Other;
    std::string speaker_label;

    /// Last whitespace-separated token of display_name, e.g. "Trump".
    [[nodiscard]] std::string surname() const;

    bool operator==(const CandidateRef&) const = default;
};

} // namespace potus

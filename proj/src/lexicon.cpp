#include "kgpipe/quality.hpp"

namespace kgpipe {

const std::vector<std::string>& default_sustainability_lexicon() {
    static const std::vector<std::string> kTerms = {
        "biodiversity", "carbon",      "circular",   "climate",    "clean",        "compost",
        "conservation", "decarbon",    "emission",   "energy",     "environment",  "esg",
        "footprint",    "fossil",      "green",      "greenhouse", "heat pump",    "hydrogen",
        "net zero",     "net-zero",    "packaging",  "plastic",    "pollution",    "practice",
        "policy",       "policies",    "recycl",     "renewable",  "resource",     "reuse",
        "solar",        "sustainab",   "waste",      "water",      "wind",
    };
    return kTerms;
}

}  // namespace kgpipe

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "vanlearn/error.hpp"

namespace vanlearn {

enum class Algorithm { kmeans, linreg, logreg, dtree };

inline constexpr std::array<Algorithm, 4> all_algorithms{Algorithm::kmeans, Algorithm::linreg, Algorithm::logreg,
                                                         Algorithm::dtree};

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::kmeans: return "kmeans";
        case Algorithm::linreg: return "linreg";
        case Algorithm::logreg: return "logreg";
        case Algorithm::dtree: return "dtree";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : all_algorithms)
        if (to_string(a) == name) return a;
    throw Error("E_ALGORITHM", "unknown algorithm '" + std::string(name) + "' (kmeans, linreg, logreg, dtree)");
}

inline bool is_supervised(Algorithm a) { return a != Algorithm::kmeans; }

// Number of user-supplied parameters each algorithm takes: k for k-means, the
// target column for the regressions, nothing for the tree (last column is the
// output by convention).
inline int parameter_arity(Algorithm a) { return a == Algorithm::dtree ? 0 : 1; }

// UI contract: pointer clicks from data-loaded to result-rendered. k-means is a
// single Run click; supervised flows are choose-train-file, upload, Train,
// choose-test-file, Predict.
inline int click_count(Algorithm a) { return a == Algorithm::kmeans ? 1 : 5; }

inline std::string_view display_name(Algorithm a) {
    switch (a) {
        case Algorithm::kmeans: return "k-means";
        case Algorithm::linreg: return "Linear Regression";
        case Algorithm::logreg: return "Logistic regression";
        case Algorithm::dtree: return "Decision Tree";
    }
    return "?";
}

}  // namespace vanlearn

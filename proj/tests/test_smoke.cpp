#include <doctest.h>

#include "earl/acquisition.hpp"
#include "earl/adamw.hpp"
#include "earl/cli.hpp"
#include "earl/controller.hpp"
#include "earl/csv.hpp"
#include "earl/dataset.hpp"
#include "earl/evaluator.hpp"
#include "earl/gp.hpp"
#include "earl/objectives.hpp"
#include "earl/readout.hpp"
#include "earl/reservoir.hpp"
#include "earl/rl.hpp"
#include "earl/rng.hpp"
#include "earl/search_space.hpp"
#include "earl/sobol.hpp"
#include "earl/trial_log.hpp"
#include "earl/types.hpp"

TEST_CASE("headers compile and defaults hold together") {
    earl::SearchSpace space;
    space.validate();
    const earl::Configuration mid = earl::from_unit_cube(earl::Vec4::Constant(0.5), space);
    CHECK(mid.reservoir_size == 550);
    CHECK(earl::in_space(mid, space));
}

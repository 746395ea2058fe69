#pragma once

#include "repurpose/error.hpp"

#include <gtest/gtest.h>

#define EXPECT_ERROR_KIND(statement, expected_kind)                                                             \
    do {                                                                                                        \
        try {                                                                                                   \
            statement;                                                                                          \
            ADD_FAILURE() << "expected " << repurpose::to_string(expected_kind) << " from " #statement;        \
        } catch (const repurpose::Error& e_) {                                                                  \
            EXPECT_EQ(e_.kind(), expected_kind) << e_.what();                                                   \
        }                                                                                                       \
    } while (0)

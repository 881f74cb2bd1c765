// Tabulated sum rates under unit capacities, grouped by value, transcribed
// separately from the bundled data files.

const TABLE_GROUPS: &[((i64, i64), &[u32])] = &[
    (
        (15, 1),
        &[
            1, 2, 3, 5, 6, 7, 8, 10, 11, 12, 13, 15, 17, 19, 20, 22, 25, 26, 33, 35, 38, 39, 40,
            41, 49, 63, 65, 67, 69, 70, 100,
        ],
    ),
    ((56, 3), &[47]),
    (
        (19, 1),
        &[
            4, 9, 18, 21, 23, 24, 34, 36, 48, 55, 64, 66, 68, 86, 95, 99, 138, 16, 30, 60, 102,
        ],
    ),
    ((20, 1), &[43, 78, 83, 85, 130, 132]),
    (
        (21, 1),
        &[
            14, 27, 28, 29, 31, 32, 37, 50, 51, 52, 53, 54, 56, 57, 58, 59, 61, 62, 87, 88, 89, 90,
            91, 92, 94, 96, 97, 98, 101, 134, 136, 137, 139, 140, 141, 173,
        ],
    ),
    (
        (22, 1),
        &[
            42, 44, 45, 71, 72, 73, 74, 75, 76, 77, 79, 80, 82, 84, 103, 104, 105, 106, 107, 108,
            109, 110, 111, 113, 116, 117, 118, 120, 122, 123, 124, 125, 126, 127, 128, 131, 133,
            142, 143, 144, 145, 147, 151, 152, 153, 154, 158, 159, 161, 162, 163, 164, 165, 166,
            167, 168, 169, 174, 177, 182, 183, 184, 185, 186, 187, 201,
        ],
    ),
    ((70, 3), &[46]),
    ((47, 2), &[81, 112, 115, 119, 148]),
    (
        (24, 1),
        &[
            114, 121, 129, 146, 150, 155, 156, 157, 160, 170, 171, 175, 178, 180, 181, 188, 189,
            190, 191, 192, 194, 195, 196, 197, 198, 202, 204, 206, 208, 210, 216,
        ],
    ),
    ((25, 1), &[93, 135, 172, 199]),
    ((26, 1), &[207, 149, 176, 179, 200, 203, 212]),
    ((28, 1), &[193, 205, 209, 211, 213, 214, 215, 217]),
    ((32, 1), &[218]),
];

/// Instances the two outer bounds already close beyond the polymatroid LP.
const RESCUED: &[u32] = &[
    4, 9, 14, 18, 21, 23, 24, 27, 28, 29, 31, 32, 34, 36, 37, 48, 50, 51, 52, 53, 54, 55, 56, 57,
    58, 59, 61, 62, 64, 66, 68, 86, 87, 88, 89, 90, 91, 92, 94, 95, 96, 97, 98, 99, 101, 134, 136,
    137, 138, 139, 140, 141, 173,
];

/// Instances left open by both outer bounds.
const UNRESOLVED: &[u32] = &[
    16, 30, 46, 60, 81, 93, 102, 112, 115, 119, 135, 148, 149, 172, 176, 179, 199, 200, 203, 212,
];

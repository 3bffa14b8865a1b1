import io
import itertools
from unittest import TestCase

from frequency_data import (
    AbundanceVector,
    FrequencyCountTable,
    FrequencyTableError,
    expand_to_abundances,
    from_abundances,
    parse_abundance_vector,
    parse_frequency_table,
    simpson_plugin,
)


class FrequencyTableParsingTests(TestCase):
    def test_parse_comma_separated_table(self):
        table = parse_frequency_table("1,10\n2,5\n3,2", "A")
        self.assertEqual(table.entries, ((1, 10), (2, 5), (3, 2)))
        self.assertEqual(table.observed_richness, 17)
        self.assertEqual(table.sample_size, 26)
        self.assertEqual(table.sample_id, "A")

    def test_zero_count_rows_are_dropped(self):
        table = parse_frequency_table("1,0\n2,1", "A")
        self.assertEqual(table.entries, ((2, 1),))
        self.assertEqual(table.observed_richness, 1)
        self.assertEqual(table.sample_size, 2)

    def test_rows_are_sorted_by_frequency(self):
        table = parse_frequency_table("2,3\n1,4", "A")
        self.assertEqual(table.entries, ((1, 4), (2, 3)))

    def test_tab_separated_table_with_header(self):
        table = parse_frequency_table("frequency\tcount\n1\t4\n3\t1\n", "A")
        self.assertEqual(table.entries, ((1, 4), (3, 1)))

    def test_parse_from_stream(self):
        table = parse_frequency_table(io.StringIO("j,f_j\n1,2\n2,2\n"), "A")
        self.assertEqual(table.entries, ((1, 2), (2, 2)))

    def test_integral_float_values_are_accepted(self):
        table = parse_frequency_table("1,3.0\n2.0,1", "A")
        self.assertEqual(table.entries, ((1, 3), (2, 1)))

    def test_non_integer_value_names_the_line(self):
        with self.assertRaises(FrequencyTableError) as context:
            parse_frequency_table("1,3\n2,1.5\n", "A")
        self.assertEqual(context.exception.line_number, 2)
        self.assertIn("line 2", str(context.exception))

    def test_duplicate_frequency_names_the_line(self):
        with self.assertRaises(FrequencyTableError) as context:
            parse_frequency_table("1,3\n2,1\n1,4\n", "A")
        self.assertEqual(context.exception.line_number, 3)

    def test_frequency_below_one_is_an_error(self):
        with self.assertRaises(FrequencyTableError) as context:
            parse_frequency_table("0,3\n", "A")
        self.assertEqual(context.exception.line_number, 1)

    def test_negative_count_is_an_error(self):
        with self.assertRaises(FrequencyTableError):
            parse_frequency_table("1,-3\n", "A")

    def test_empty_table_is_an_error(self):
        with self.assertRaises(FrequencyTableError):
            parse_frequency_table("", "A")
        with self.assertRaises(FrequencyTableError):
            parse_frequency_table("1,0\n2,0\n", "A")

    def test_wrong_column_count_is_an_error(self):
        with self.assertRaises(FrequencyTableError) as context:
            parse_frequency_table("1,2,3\n", "A")
        self.assertEqual(context.exception.line_number, 1)

    def test_frequency_table_error_is_a_value_error(self):
        self.assertTrue(issubclass(FrequencyTableError, ValueError))


class FrequencyCountTableTests(TestCase):
    def test_singletons_and_doubletons(self):
        table = FrequencyCountTable(((1, 10), (2, 5), (4, 1)), "A")
        self.assertEqual(table.singletons, 10)
        self.assertEqual(table.doubletons, 5)
        self.assertEqual(table.count(3), 0)
        self.assertEqual(table.distinct_frequencies(), 3)

    def test_unsorted_entries_are_rejected(self):
        with self.assertRaises(FrequencyTableError):
            FrequencyCountTable(((2, 1), (1, 1)))

    def test_table_without_species_is_rejected(self):
        with self.assertRaises(FrequencyTableError):
            FrequencyCountTable(((1, 0),))

    def test_observed_richness_never_exceeds_sample_size(self):
        table = FrequencyCountTable(((1, 7), (5, 2), (9, 3)))
        self.assertLessEqual(table.observed_richness, table.sample_size)


class AbundanceVectorTests(TestCase):
    def test_tally_abundances(self):
        table = from_abundances([1, 1, 1, 2], "A")
        self.assertEqual(table.entries, ((1, 3), (2, 1)))
        self.assertEqual(table.sample_id, "A")

    def test_single_species(self):
        table = from_abundances(AbundanceVector((5,), "B"))
        self.assertEqual(table.entries, ((5, 1),))
        self.assertEqual(table.observed_richness, 1)
        self.assertEqual(table.sample_id, "B")

    def test_distinct_abundances(self):
        table = from_abundances(list(range(1, 8)))
        self.assertTrue(all(f == 1 for _, f in table.entries))
        self.assertEqual(table.observed_richness, 7)

    def test_abundance_below_one_is_rejected(self):
        with self.assertRaises(FrequencyTableError):
            AbundanceVector((3, 0, 1))
        with self.assertRaises(FrequencyTableError):
            AbundanceVector(())

    def test_expand_then_tally_is_identity(self):
        for entries in [((1, 3), (2, 1)), ((5, 1),), ((1, 10), (2, 5), (3, 2), (40, 1))]:
            table = FrequencyCountTable(entries, "A")
            self.assertEqual(from_abundances(expand_to_abundances(table)), table)

    def test_parse_abundance_vector(self):
        vector = parse_abundance_vector("3\n1\n\n1\n", "A")
        self.assertEqual(vector.counts, (3, 1, 1))
        self.assertEqual(from_abundances(vector).entries, ((1, 2), (3, 1)))

    def test_parse_abundance_vector_names_the_line(self):
        with self.assertRaises(FrequencyTableError) as context:
            parse_abundance_vector("3\nmany\n", "A")
        self.assertEqual(context.exception.line_number, 2)


class SimpsonPluginTests(TestCase):
    def test_single_species(self):
        self.assertEqual(simpson_plugin(FrequencyCountTable(((5, 1),))), 1.0)

    def test_equal_abundances(self):
        for k in [2, 3, 10]:
            table = FrequencyCountTable(((4, k),))
            self.assertAlmostEqual(simpson_plugin(table), 1.0 / k, places=12)

    def test_hand_evaluated_value(self):
        table = FrequencyCountTable(((1, 2), (3, 2)))
        self.assertAlmostEqual(simpson_plugin(table), 0.3125, places=12)

    def test_invariant_under_species_permutation(self):
        abundances = [1, 4, 2, 7, 1, 3]
        expected = simpson_plugin(from_abundances(abundances))
        for permutation in itertools.permutations(abundances):
            self.assertAlmostEqual(simpson_plugin(from_abundances(permutation)), expected, places=12)

    def test_equal_abundances_minimise_the_index(self):
        c = 3
        for n in range(c, 13):
            compositions = [
                parts
                for parts in itertools.product(range(1, n + 1), repeat=c)
                if sum(parts) == n
            ]
            values = [simpson_plugin(from_abundances(parts)) for parts in compositions]
            self.assertGreaterEqual(min(values), 1.0 / c - 1e-12)
            if n % c == 0:
                self.assertAlmostEqual(min(values), 1.0 / c, places=12)

    def test_equals_one_only_for_a_single_species(self):
        self.assertLess(simpson_plugin(from_abundances([100, 1])), 1.0)

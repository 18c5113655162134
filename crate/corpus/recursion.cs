namespace Algo
{
    public class Recursion
    {
        public static int Factorial(int n)
        {
            if (n <= 1)
            {
                return 1;
            }
            return n * Factorial(n - 1);
        }

        public static bool IsEven(int n)
        {
            return n == 0 ? true : IsOdd(n - 1);
        }

        public static bool IsOdd(int n)
        {
            return n == 0 ? false : IsEven(n - 1);
        }
    }
}

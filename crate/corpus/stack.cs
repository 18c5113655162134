namespace Util
{
    public class IntStack
    {
        private int[] items;
        private int top;

        public IntStack(int size)
        {
            items = new int[size];
            top = 0;
        }

        public void Push(int v)
        {
            if (top == items.Length)
            {
                throw new OverflowException("full");
            }
            items[top++] = v;
        }

        public int Pop()
        {
            if (top == 0)
            {
                throw new InvalidOperationException();
            }
            top--;
            return items[top];
        }

        /* Drains the stack. */
        public int Sum()
        {
            int s = 0;
            while (top > 0)
            {
                s += Pop();
            }
            return s;
        }
    }
}

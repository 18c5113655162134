namespace IO
{
    class LineReader
    {
        private string path;
        private int lines;

        public LineReader(string path)
        {
            this.path = path;
        }

        public bool TryCount(out int n)
        {
            n = 0;
            try
            {
                using (StreamReader r = new StreamReader(path))
                {
                    while (r.ReadLine() != null)
                    {
                        n++;
                    }
                }
                lines = n;
                return true;
            }
            catch (IOException ex)
            {
                Report(ex);
                return false;
            }
        }

        private void Report(IOException ex) { }

        public static void Swap(ref int a, ref int b)
        {
            int t = a;
            a = b;
            b = t;
        }
    }
}
